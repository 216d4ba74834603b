"""Perturbed unit-vector systems that separate semi-greedy from almost greedy.

Three families on ambient dimension N (coordinates e_1..e_N):

* ``L1Alpha``: x_i = e_i + 2(alpha+1)(-1)^i e_1 in l1,
* ``SupNorm``: x_i = e_i + (-1)^i e_1 in l-infinity,
* ``LpVariant``: the SupNorm vectors in lp, 1 < p < infinity,

for i = 2..N, with duals e_i' restricted to the span.  Labels keep the
indices 2..N; positions inside the system are 0-based.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .approximation import ErrorTable
from .constants import (ConstantEstimate, estimate_constant, estimate_democracy_family)
from .corpus import CorpusSpec, generate_corpus
from .greedy import ThresholdingSet, enumerate_weak_sets, is_weak_set
from .spaces import MinimalSystem, NormSpec, validate_system

FAMILIES = ("L1Alpha", "SupNorm", "LpVariant")


@dataclass(frozen=True)
class ExampleSpec:
    family: str
    N: int
    alpha: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.N < 4:
            raise ValueError(f"N must be >= 4, got {self.N}")
        if self.family == "L1Alpha" and not (self.alpha is not None and self.alpha > 0):
            raise ValueError("L1Alpha needs alpha > 0")
        if self.family == "LpVariant" and not (self.p is not None and 1 < self.p < math.inf):
            raise ValueError("LpVariant needs 1 < p < infinity")

    def to_dict(self) -> dict:
        d = {"family": self.family, "N": self.N}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.p is not None:
            d["p"] = self.p
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExampleSpec":
        alpha = d.get("alpha")
        p = d.get("p")
        return cls(d["family"], int(d["N"]),
                   float(alpha) if alpha is not None else None,
                   float(p) if p is not None else None)

    @property
    def slug(self) -> str:
        extra = f",alpha={self.alpha:g}" if self.alpha is not None else ""
        extra += f",p={self.p:g}" if self.p is not None else ""
        return f"{self.family}(N={self.N}{extra})"

    def bound_factor(self, tau: float) -> float:
        """Constant c with ||x - sum_W b x|| <= (c/tau) ||x - sum_A a x||."""
        if self.family == "L1Alpha":
            c = 4.0
        elif self.family == "SupNorm":
            c = 3.0
        else:
            c = 3.0 * 2.0 ** (1.0 / self.p)
        return c / tau


def build_example(spec: ExampleSpec) -> MinimalSystem:
    N = spec.N
    if spec.family == "L1Alpha":
        amp, norm = 2.0 * (spec.alpha + 1.0), NormSpec.lp(1)
    elif spec.family == "SupNorm":
        amp, norm = 1.0, NormSpec.linf()
    else:
        amp, norm = 1.0, NormSpec.lp(spec.p)
    labels = tuple(range(2, N + 1))
    basis = np.zeros((N - 1, N))
    duals = np.zeros((N - 1, N))
    for r, i in enumerate(labels):
        basis[r, i - 1] = 1.0
        basis[r, 0] = amp * (-1.0) ** i
        duals[r, i - 1] = 1.0
    return MinimalSystem(basis, duals, norm, labels=labels, name=spec.slug)


def constructive_approximant(sys: MinimalSystem, x, m: int, tau: float, W, A, a) -> np.ndarray:
    """Coefficients ``b`` on the weak set ``W`` matching a competitor on ``A``.

    ``b_j = a_j`` on ``W & A``; for ``j`` in ``W - A``,
    ``b_j = (-1)^(j + pi(j)) a_pi(j)`` where ``pi`` pairs ``W - A`` with
    ``A - W`` in increasing order and parities use the labels.  ``a`` is
    indexed by system position (only entries on ``A`` are read).
    Returns a full-length coefficient vector supported on ``W``.
    """
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    if isinstance(W, ThresholdingSet):
        W = W.indices
    W, A = sorted(set(W)), sorted(set(A))
    if len(W) != m or len(A) != m:
        raise ValueError(f"|W|={len(W)} and |A|={len(A)} must both equal m={m}")
    if not is_weak_set(x, W, tau):
        raise ValueError(f"{W} is not a {tau}-weak thresholding set for x")
    labels = sys.labels if sys.labels is not None else tuple(range(sys.size))
    b = np.zeros(sys.size)
    Aset = set(A)
    only_w = [j for j in W if j not in Aset]
    only_a = [i for i in A if i not in set(W)]
    for j in W:
        if j in Aset:
            b[j] = a[j]
    for j, i in zip(only_w, only_a):
        b[j] = (-1.0) ** (labels[j] + labels[i]) * a[i]
    return b


@dataclass
class SweepResult:
    trials: int
    factor: float
    worst_slack: float
    worst_ratio: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"trials": self.trials, "factor": self.factor, "worst_slack": self.worst_slack,
                "worst_ratio": self.worst_ratio, "violations": self.violations[:5],
                "violation_count": len(self.violations)}


def _random_instance(rng, N: int):
    kind = rng.integers(3)
    if kind == 0:
        x = rng.standard_normal(N)
    elif kind == 1:
        x = rng.integers(-4, 5, size=N).astype(float)
        if not x.any():
            x[0] = 1.0
    else:
        x = rng.standard_normal(N) * (rng.random(N) < 0.6)
        if not x.any():
            x[rng.integers(N)] = 1.0
    return x


def constructive_sweep(spec: ExampleSpec, tau: float, trials: int = 1000, seed: int = 0,
                       sys: MinimalSystem | None = None, tol: float = 1e-9) -> SweepResult:
    """Randomized check of the approximant bound over certified weak sets."""
    sys = sys or build_example(spec)
    rng = np.random.Generator(np.random.PCG64(seed))
    N = sys.size
    factor = spec.bound_factor(tau)
    res = SweepResult(trials, factor, math.inf, 0.0)
    for t in range(trials):
        x = _random_instance(rng, N)
        m = int(rng.integers(1, N + 1))
        sets = enumerate_weak_sets(x, m, tau)
        W = sets[int(rng.integers(len(sets)))].indices
        A = tuple(sorted(rng.choice(N, size=m, replace=False)))
        a = np.zeros(N)
        u = rng.random()
        if u < 0.25:
            a[list(A)] = x[list(A)]
        elif u < 0.6:
            a[list(A)] = x[list(A)] + 0.3 * rng.standard_normal(m)
        else:
            a[list(A)] = 3.0 * rng.standard_normal(m)
        b = constructive_approximant(sys, x, m, tau, W, A, a)
        lhs = float(sys.vec_norm(x - b))
        rhs = float(sys.vec_norm(x - a))
        slack = factor * rhs - lhs
        res.worst_slack = min(res.worst_slack, slack)
        if rhs > 0:
            res.worst_ratio = max(res.worst_ratio, lhs / rhs)
        if slack < -tol:
            res.violations.append({"trial": t, "x": x.tolist(), "m": m, "W": list(W),
                                   "A": list(A), "a": a.tolist(), "lhs": lhs, "rhs": rhs})
    return res


def family_knowns(spec: ExampleSpec, tau: float = 1.0) -> dict[str, ConstantEstimate]:
    """Constructive upper bounds from the approximant construction."""
    note = {"source": "constructive approximant", "family": spec.slug}
    out = {"K_s": ConstantEstimate("K_s", spec.bound_factor(1.0), "upper", {}, note)}
    for name in ("K_ws", "K_bsg"):
        out[name] = ConstantEstimate(name, spec.bound_factor(tau), "upper", {}, note, tau=tau)
    return out


def _claim(claim: str, status: str, **data) -> dict:
    return {"claim": claim, "status": status, **data}


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def verify_example_claims(spec: ExampleSpec, tau: float = 1.0, trials: int = 1000,
                          seed: int = 0, corpus_spec: CorpusSpec | None = None,
                          refine_rounds: int = 50) -> list[dict]:
    """Check the finite-dimensional claims about one example system."""
    sys = build_example(spec)
    out = []
    v = validate_system(sys)
    out.append(_claim("biorthogonal system on its span", _status(v.ok),
                      residual=v.biorth_residual, failures=v.failures))
    N = sys.size
    corpus_spec = corpus_spec or CorpusSpec(block_max=min(3, N), sign_max=min(2, N),
                                            gaussian=10)
    corpus = generate_corpus(N, corpus_spec, seed)
    table = ErrorTable(sys)
    e = np.eye(N)

    if spec.family == "L1Alpha":
        al = spec.alpha
        n2 = float(sys.vec_norm(e[0]))
        n23 = float(sys.vec_norm(e[0] + e[1]))
        out.append(_claim("||x_2|| = 2 alpha + 3", _status(abs(n2 - (2 * al + 3)) <= 1e-12),
                          value=n2, expected=2 * al + 3))
        out.append(_claim("||x_2 + x_3|| = 2", _status(abs(n23 - 2) <= 1e-12),
                          value=n23, expected=2.0))
        bound = (2 * al + 3) / 2
        dem = estimate_democracy_family(sys, which=("K_d",))["K_d"]
        out.append(_claim("K_d >= (2 alpha + 3)/2 > alpha + 1",
                          _status(dem.value >= bound - 1e-9 and bound > al + 1),
                          estimate=dem.value, bound=bound, witness=dem.witness))
        k1 = estimate_constant(sys, "K_1q", corpus, table=table, refine_rounds=refine_rounds)
        g1 = float(sys.vec_norm(e[0]) / n23)
        out.append(_claim("K_1q >= (2 alpha + 3)/2 via G_1(x_2 + x_3) = x_2",
                          _status(k1.value >= bound - 1e-9 and abs(g1 - bound) <= 1e-12),
                          estimate=k1.value, witness_ratio=g1, bound=bound))
        k2 = estimate_constant(sys, "K_2q", corpus, table=table, refine_rounds=refine_rounds)
        ka = estimate_constant(sys, "K_a", corpus, table=table, refine_rounds=refine_rounds)
        out.append(_claim("K_2q > alpha", _status(k2.value > al), estimate=k2.value))
        out.append(_claim("K_a > alpha", _status(ka.value > al), estimate=ka.value))
        if tau < 1:
            kw = estimate_constant(sys, "K_wag", corpus, tau, table=table,
                                   refine_rounds=refine_rounds)
            out.append(_claim("WAG(tau) constant exceeds tau sqrt(alpha + 1)", "NOT-CHECKABLE",
                              note="concerns the true constant; only a lower bound is computed",
                              estimate=kw.value, threshold=tau * math.sqrt(al + 1), tau=tau))
    elif spec.family in ("SupNorm", "LpVariant"):
        n = spec.N // 4  # labels up to 4n must exist
        if n >= 1:
            # labels 2, 4, ..., 4n sit at positions 0, 2, ..., 4n - 2
            A = np.zeros(N)
            A[[lab - 2 for lab in range(2, 4 * n + 1, 2)]] = 1.0
            B = np.zeros(N)
            B[[lab - 2 for lab in range(2, 2 * n + 2)]] = 1.0
            num, den = float(sys.vec_norm(A)), float(sys.vec_norm(B))
            if spec.family == "SupNorm":
                out.append(_claim("democracy ratio = 2n (not democratic)",
                                  _status(abs(num / den - 2 * n) <= 1e-12),
                                  n=n, ratio=num / den, expected=2 * n, num=num, den=den))
            else:
                p = spec.p
                expected = ((2 * n) ** p + 2 * n) ** (1 / p) / (2 * n) ** (1 / p)
                out.append(_claim("democracy ratio ((2n)^p + 2n)^(1/p) / (2n)^(1/p)",
                                  _status(abs(num / den - expected) <= 1e-9),
                                  n=n, ratio=num / den, expected=expected))
        if spec.family == "SupNorm":
            out.append(_claim("not a Markushevich basis", "NOT-CHECKABLE",
                              note="infinite-dimensional phenomenon; the truncation is biorthogonal"))
    sweep = constructive_sweep(spec, tau, trials, seed, sys)
    out.append(_claim(f"approximant bound with factor {spec.bound_factor(1.0):g}/tau",
                      _status(sweep.ok), tau=tau, **sweep.to_dict()))
    ks = estimate_constant(sys, "K_s", corpus, table=table, refine_rounds=refine_rounds)
    limit = spec.bound_factor(1.0)
    out.append(_claim(f"semi-greedy estimate <= {limit:g}", _status(ks.value <= limit + 1e-6),
                      estimate=ks.value, bound=limit, witness=ks.witness))
    return out
