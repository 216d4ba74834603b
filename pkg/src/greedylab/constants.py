"""Witness-certified lower bounds for the greedy-type constants of a system.

Every corpus-driven estimate is the maximum of a ratio over (item, m)
pairs; the witness records the maximizing pair so that
:func:`evaluate_witness` reproduces the value.  Ratios with a vanishing
denominator (at most ``ZERO_TOL``) are skipped and counted.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .approximation import ErrorTable, ZERO_TOL
from .corpus import Corpus
from .greedy import (branch_greedy_sum, branch_ordering, enumerate_weak_sets,
                     get_selector, greedy_set, greedy_sum)
from .spaces import MinimalSystem, project, support

CORPUS_NAMES = ("K_1q", "K_2q", "K_a", "K_s", "K_g", "K_ws", "K_wag", "K_bsg", "K_bag")
DEMOCRACY_NAMES = ("K_d", "K_sd", "K_hd")
ALL_NAMES = CORPUS_NAMES + DEMOCRACY_NAMES
TAU_NAMES = ("K_ws", "K_wag", "K_bsg", "K_bag")
SIGMA_NAMES = ("K_g", "K_s", "K_ws", "K_bsg")  # divided by sigma_m

REFINE_FACTORS = tuple(f for k in range(1, 5) for f in (1 + 10.0 ** -k, 1 - 10.0 ** -k))


@dataclass
class ConstantEstimate:
    name: str
    value: float
    direction: str = "lower"     # "lower" (search) or "upper" (construction)
    witness: dict = field(default_factory=dict)
    corpus: dict = field(default_factory=dict)
    skipped: int = 0
    tau: float | None = None
    selector: str | None = None

    @property
    def key(self) -> str:
        return f"{self.name}({self.tau:g})" if self.tau is not None else self.name

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "direction": self.direction,
                "witness": self.witness, "corpus": self.corpus, "skipped": self.skipped,
                "tau": self.tau, "selector": self.selector}

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantEstimate":
        return cls(**d)


class _Ratios:
    """Numerator/denominator pairs defining each corpus constant."""

    def __init__(self, sys: MinimalSystem, table: ErrorTable | None = None,
                 tau: float = 1.0, sel=None):
        self.sys = sys
        self.table = table or ErrorTable(sys)
        self.tau = tau
        self.sel = get_selector(sel)

    def m_range(self, name: str) -> range:
        N = self.sys.size
        if name in ("K_s", "K_ws", "K_wag", "K_bsg"):
            return range(1, N + 1)
        return range(0, N + 1)

    def ratio(self, name: str, x: np.ndarray, m: int):
        """Return ``(num, den, extra)``; ``den`` may be ~0 (caller skips)."""
        sys, t = self.sys, self.table
        nrm = sys.vec_norm
        if name == "K_1q":
            return nrm(greedy_sum(x, m)), nrm(x), {}
        if name == "K_2q":
            return nrm(x - greedy_sum(x, m)), nrm(x), {}
        if name == "K_a":
            st = t.sigma_tilde(x, m)
            return nrm(x - greedy_sum(x, m)), st.value, {"best_set": list(st.support)}
        if name == "K_g":
            sg = t.sigma(x, m)
            return nrm(x - greedy_sum(x, m)), sg.value, {"best_support": list(sg.support)}
        if name == "K_s":
            sg = t.sigma(x, m)
            G = greedy_set(x, m)
            return t.cheb(x, G), sg.value, {"set": list(G), "best_support": list(sg.support)}
        if name == "K_ws":
            sg = t.sigma(x, m)
            if sg.value <= ZERO_TOL:
                return 0.0, sg.value, {}
            best, W = min((t.cheb(x, w.indices), w.indices)
                          for w in enumerate_weak_sets(x, m, self.tau))
            return best, sg.value, {"set": list(W), "best_support": list(sg.support)}
        if name == "K_wag":
            st = t.sigma_tilde(x, m)
            if st.value <= ZERO_TOL:
                return 0.0, st.value, {}
            best, W = min((float(nrm(x - project(x, w.indices))), w.indices)
                          for w in enumerate_weak_sets(x, m, self.tau))
            return best, st.value, {"set": list(W), "best_set": list(st.support)}
        if name == "K_bsg":
            sg = t.sigma(x, m)
            if sg.value <= ZERO_TOL:
                return 0.0, sg.value, {}
            S = tuple(sorted(branch_ordering(x, self.tau, self.sel)[:m]))
            return t.cheb(x, S), sg.value, {"set": list(S), "best_support": list(sg.support)}
        if name == "K_bag":
            st = t.sigma_tilde(x, m)
            return (nrm(x - branch_greedy_sum(x, self.tau, m, self.sel)), st.value,
                    {"best_set": list(st.support)})
        raise ValueError(f"unknown constant {name!r}")

    def _sigma_numerator(self, name: str, x: np.ndarray, m: int) -> float:
        t = self.table
        if name == "K_g":
            return float(self.sys.vec_norm(x - greedy_sum(x, m)))
        if name == "K_s":
            return t.cheb(x, greedy_set(x, m))
        if name == "K_ws":
            return min(t.cheb(x, w.indices) for w in enumerate_weak_sets(x, m, self.tau))
        return t.cheb(x, sorted(branch_ordering(x, self.tau, self.sel)[:m]))

    def screen(self, name: str, x, m: int, hint) -> float | None:
        """Cheap lower bound on the ratio, for ranking refinement moves.

        For constants divided by ``sigma_m`` the error on the support
        ``hint`` bounds ``sigma_m`` from above, so ``num / err(hint)`` never
        exceeds the exact ratio.  Other constants are cheap and exact.
        """
        x = np.asarray(x, dtype=float)
        if name not in SIGMA_NAMES or hint is None or len(support(x)) <= m:
            return self.value(name, x, m)
        den = self.table.cheb(x, hint)
        if den <= ZERO_TOL:
            return None
        return self._sigma_numerator(name, x, m) / den

    def value(self, name: str, x, m: int) -> float | None:
        num, den, _ = self.ratio(name, np.asarray(x, dtype=float), m)
        if den <= ZERO_TOL:
            return None
        return float(num) / float(den)


def _items(corpus) -> np.ndarray:
    items = corpus.items if isinstance(corpus, Corpus) else corpus
    return np.array(items, dtype=float, ndmin=2)


def _descriptor(corpus) -> dict:
    if isinstance(corpus, Corpus):
        return corpus.descriptor()
    return {"size": len(_items(corpus)), "spec": "user"}


def _refine(R: _Ratios, name: str, x: np.ndarray, m: int, value: float, rounds: int):
    """Coordinate-wise multiplicative hill climbing at fixed m.

    One round tries every factor on one coordinate; stops after a full
    cycle of coordinates without improvement.
    """
    N = x.size
    stale = 0
    for r in range(rounds):
        j = r % N
        if x[j] != 0:
            hint = R.table.sigma(x, m).support if name in SIGMA_NAMES else None
            best = None
            for f in REFINE_FACTORS:
                y = x.copy()
                y[j] *= f
                v = R.screen(name, y, m, hint)
                if v is not None and v > value * (1 + 1e-12) and (best is None or v > best[0]):
                    best = (v, y)
            exact = R.value(name, best[1], m) if best is not None else None
            # the exact ratio is at least the screened one, up to roundoff
            if exact is not None and exact > value:
                value, x = exact, best[1]
                stale = 0
                continue
        stale += 1
        if stale >= N:
            break
    return x, value


def _estimate(R: _Ratios, name: str, corpus, refine_rounds: int) -> ConstantEstimate:
    items = _items(corpus)
    if len(items) == 0:
        raise ValueError("empty corpus")
    best, arg, skipped = -math.inf, None, 0
    for idx, x in enumerate(items):
        for m in R.m_range(name):
            v = R.value(name, x, m)
            if v is None:
                skipped += 1
                continue
            if v > best:
                best, arg = v, (idx, m)
    if arg is None:
        raise ValueError(f"{name}: every ratio had a vanishing denominator")
    idx, m = arg
    x = items[idx].copy()
    if refine_rounds:
        x, best = _refine(R, name, x, m, best, refine_rounds)
    num, den, extra = R.ratio(name, x, m)
    witness = {"x": x.tolist(), "m": m, "item": idx, "num": float(num), "den": float(den),
               "refined": not np.array_equal(x, items[idx])}
    witness.update(extra)
    tau = R.tau if name in TAU_NAMES else None
    sel = R.sel.name if name in ("K_bsg", "K_bag") else None
    return ConstantEstimate(name, float(num) / float(den), "lower", witness,
                            _descriptor(corpus), skipped, tau, sel)


def estimate_constant(sys: MinimalSystem, name: str, corpus, tau: float = 1.0, sel=None,
                      table: ErrorTable | None = None, refine_rounds: int = 200) -> ConstantEstimate:
    if name not in CORPUS_NAMES:
        raise ValueError(f"unknown corpus constant {name!r}")
    return _estimate(_Ratios(sys, table, tau, sel), name, corpus, refine_rounds)


def estimate_quasi_greedy(sys, corpus, table=None, refine_rounds=200):
    """First and second quasi-greedy constants ``(K_1q, K_2q)``."""
    return (estimate_constant(sys, "K_1q", corpus, table=table, refine_rounds=refine_rounds),
            estimate_constant(sys, "K_2q", corpus, table=table, refine_rounds=refine_rounds))


def estimate_almost_greedy(sys, corpus, table=None, refine_rounds=200):
    return estimate_constant(sys, "K_a", corpus, table=table, refine_rounds=refine_rounds)


def estimate_semi_greedy(sys, corpus, table=None, refine_rounds=200):
    return estimate_constant(sys, "K_s", corpus, table=table, refine_rounds=refine_rounds)


def estimate_greedy_constant(sys, corpus, table=None, refine_rounds=200):
    return estimate_constant(sys, "K_g", corpus, table=table, refine_rounds=refine_rounds)


def estimate_weak_constants(sys, corpus, tau, table=None, refine_rounds=200):
    """``(K_ws(tau), K_wag(tau))``: the best weak thresholding set is used."""
    return (estimate_constant(sys, "K_ws", corpus, tau, table=table, refine_rounds=refine_rounds),
            estimate_constant(sys, "K_wag", corpus, tau, table=table, refine_rounds=refine_rounds))


def estimate_branch_constants(sys, corpus, tau, sel=None, table=None, refine_rounds=200):
    """``(K_bsg(tau), K_bag(tau))`` along the branch chosen by ``sel``."""
    return (estimate_constant(sys, "K_bsg", corpus, tau, sel, table, refine_rounds),
            estimate_constant(sys, "K_bag", corpus, tau, sel, table, refine_rounds))


# --- democracy family -------------------------------------------------------

A_GRID = (1.0, 0.5, 0.25)
B_GRID = (1.0, 2.0, 4.0)


def _signed(N: int, A: tuple, amps) -> np.ndarray:
    k = len(A)
    vals = [s * a for a in amps for s in (1.0, -1.0)]
    out = np.zeros((len(vals) ** k, N))
    for r, combo in enumerate(itertools.product(vals, repeat=k)):
        out[r, list(A)] = combo
    return out


def _sampled(N: int, k: int, amps, count: int, rng) -> np.ndarray:
    out = np.zeros((count, N))
    vals = np.array([s * a for a in amps for s in (1.0, -1.0)])
    for r in range(count):
        A = rng.choice(N, size=k, replace=False)
        out[r, A] = rng.choice(vals, size=k)
    return out


class _Extremes:
    """Largest and smallest norm per cardinality, with the vectors attaining them."""

    def __init__(self, kmax: int):
        self.hi = [(-math.inf, None)] * (kmax + 1)
        self.lo = [(math.inf, None)] * (kmax + 1)

    def feed(self, k: int, vecs: np.ndarray, norms: np.ndarray, hi=True, lo=True):
        if not len(vecs):
            return
        if hi:
            i = int(np.argmax(norms))
            if norms[i] > self.hi[k][0]:
                self.hi[k] = (float(norms[i]), vecs[i].copy())
        if lo:
            i = int(np.argmin(norms))
            if norms[i] < self.lo[k][0]:
                self.lo[k] = (float(norms[i]), vecs[i].copy())

    def best_ratio(self):
        K = len(self.hi) - 1
        best = (-math.inf, None, None)
        for a in range(1, K + 1):
            for b in range(a, K + 1):
                num, va = self.hi[a]
                den, vb = self.lo[b]
                if va is None or vb is None or den <= 0:
                    continue
                if num / den > best[0]:
                    best = (num / den, va, vb)
        return best


def _democracy_estimate(sys, name, ext: _Extremes, extra: dict) -> ConstantEstimate:
    value, va, vb = ext.best_ratio()
    wit = {"a": va.tolist(), "b": vb.tolist(),
           "A": [int(i) for i in np.flatnonzero(va)], "B": [int(i) for i in np.flatnonzero(vb)]}
    return ConstantEstimate(name, float(value), "lower", wit, extra)


def estimate_democracy_family(sys: MinimalSystem, max_card: int | None = None,
                              sign_exhaustive_max: int = 10, hd_cap: int = 20_000,
                              sign_samples: int = 4096, seed: int = 0,
                              which=DEMOCRACY_NAMES) -> dict[str, ConstantEstimate]:
    """Democracy, superdemocracy and hyperdemocracy lower bounds.

    Search spaces are nested (ones, then +-1 patterns, then amplitude grids
    that contain +-1), so K_d <= K_sd <= K_hd holds by construction.
    """
    N = sys.size
    K = N if max_card is None else max_card
    if not 1 <= K <= N:
        raise ValueError(f"max_card={K} out of range 1..{N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    dem, sd, hd = _Extremes(K), _Extremes(K), _Extremes(K)
    want_sd = "K_sd" in which or "K_hd" in which
    want_hd = "K_hd" in which
    for k in range(1, K + 1):
        subsets = list(itertools.combinations(range(N), k))
        ones = np.zeros((len(subsets), N))
        for r, A in enumerate(subsets):
            ones[r, list(A)] = 1.0
        n1 = sys.vec_norm(ones)
        for e in (dem, sd, hd):
            e.feed(k, ones, n1)
        if not want_sd:
            continue
        if k <= sign_exhaustive_max:
            signed = np.vstack([_signed(N, A, (1.0,)) for A in subsets])
        else:
            signed = _sampled(N, k, (1.0,), sign_samples, rng)
        ns = sys.vec_norm(signed)
        sd.feed(k, signed, ns)
        hd.feed(k, signed, ns)
        if not want_hd:
            continue
        total = len(subsets) * 6 ** k
        for grid, is_num in ((A_GRID, True), (B_GRID, False)):
            if total <= hd_cap:
                vecs = np.vstack([_signed(N, A, grid) for A in subsets])
            else:
                vecs = _sampled(N, k, grid, hd_cap, rng)
            nv = sys.vec_norm(vecs)
            hd.feed(k, vecs, nv, hi=is_num, lo=not is_num)
    desc = {"max_card": K, "sign_exhaustive_max": sign_exhaustive_max,
            "hd_cap": hd_cap, "seed": seed, "a_grid": list(A_GRID), "b_grid": list(B_GRID)}
    out = {}
    for name, ext in (("K_d", dem), ("K_sd", sd), ("K_hd", hd)):
        if name in which:
            out[name] = _democracy_estimate(sys, name, ext, desc)
    return out


# --- witness re-evaluation --------------------------------------------------

def evaluate_witness(sys: MinimalSystem, est: ConstantEstimate) -> float:
    """Recompute an estimate's value from its witness alone."""
    w = est.witness
    if est.name in DEMOCRACY_NAMES:
        return float(sys.vec_norm(np.array(w["a"])) / sys.vec_norm(np.array(w["b"])))
    R = _Ratios(sys, None, est.tau if est.tau is not None else 1.0, est.selector)
    v = R.value(est.name, np.array(w["x"]), int(w["m"]))
    if v is None:
        raise ValueError("witness has a vanishing denominator")
    return v


def estimate_all(sys: MinimalSystem, corpus, tau: float = 1.0, sel=None,
                 names=ALL_NAMES, refine_rounds: int = 200, max_card: int | None = None,
                 seed: int = 0) -> dict[str, ConstantEstimate]:
    """Estimate every requested constant sharing one error table."""
    unknown = set(names) - set(ALL_NAMES)
    if unknown:
        raise ValueError(f"unknown constants {sorted(unknown)}")
    table = ErrorTable(sys)
    out = {}
    for name in names:
        if name in CORPUS_NAMES:
            out[name] = estimate_constant(sys, name, corpus, tau, sel, table, refine_rounds)
    dem = [n for n in names if n in DEMOCRACY_NAMES]
    if dem:
        out.update(estimate_democracy_family(sys, max_card, seed=seed, which=tuple(dem)))
    return out
