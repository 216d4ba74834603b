"""Chebyshev approximants over a fixed support and best m-term errors.

Backends: normal equations for (weighted) l2, the in-house simplex for
(weighted) l1 and l-infinity, projected subgradient for other lp norms.
The subgradient loop is warm-started by a few damped Newton steps unless
it is requested explicitly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .greedy import greedy_sum
from .spaces import MinimalSystem, as_coeffs, dual_norm, norm, support, synthesize

ENUM_CAP = 10**6
ZERO_TOL = 1e-9
SUBGRAD_MAX_ITER = 10_000
SUBGRAD_REL_GAP = 1e-9


@dataclass(frozen=True)
class ChebSolution:
    support: tuple[int, ...]
    coeffs: np.ndarray      # one entry per support index, in support order
    error: float
    backend: str
    certificate: float      # upper bound on error - optimum

    def full_coeffs(self, N: int) -> np.ndarray:
        out = np.zeros(N)
        out[list(self.support)] = self.coeffs
        return out


@dataclass(frozen=True)
class MTermError:
    m: int
    value: float
    support: tuple[int, ...]
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0))


def _lp_l1(B: np.ndarray, x: np.ndarray, w: np.ndarray | None):
    k, n = B.shape
    A = np.hstack([B.T, -B.T, np.eye(n), -np.eye(n)])
    ww = np.ones(n) if w is None else w
    c = np.concatenate([np.zeros(2 * k), ww, ww])
    res = simplex.solve_lp(c, A, x)
    return res.x[:k] - res.x[k:2 * k], res.gap


def _lp_linf(B: np.ndarray, x: np.ndarray):
    k, n = B.shape
    I = np.eye(n)
    one = np.ones((n, 1))
    Z = np.zeros((n, n))
    A = np.vstack([
        np.hstack([B.T, -B.T, one, -I, Z]),
        np.hstack([-B.T, B.T, one, Z, -I]),
    ])
    rhs = np.concatenate([x, -x])
    c = np.zeros(2 * k + 1 + 2 * n)
    c[2 * k] = 1.0
    res = simplex.solve_lp(c, A, rhs)
    return res.x[:k] - res.x[k:2 * k], res.gap


def _norm_gradient(spec, r: np.ndarray) -> np.ndarray:
    """A norming covector for ``r``: dual norm 1 and ``y.r = ||r||``."""
    nr = norm(spec, r)
    if nr == 0:
        return np.zeros_like(r)
    p = spec.p
    a = np.abs(r) / nr
    y = np.sign(r) * a ** (p - 1)
    if spec.weights is not None:
        y = y * np.asarray(spec.weights)
    return y


def _annihilator_projector(B: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the covectors vanishing on the rows of ``B``."""
    n = B.shape[1]
    if not B.shape[0]:
        return np.eye(n)
    return np.eye(n) - B.T @ np.linalg.pinv(B @ B.T) @ B


def _dual_lower_bound(spec, B: np.ndarray, x: np.ndarray, y: np.ndarray,
                      proj: np.ndarray | None = None) -> float:
    """Lower bound on min_b ||x - B^T b|| from a covector ``y``.

    ``y`` is projected onto the annihilator of the rows of ``B``; for any
    such covector ``f``, ``f.x = f.(x - B^T b) <= ||f||_* ||x - B^T b||``.
    """
    y = (proj if proj is not None else _annihilator_projector(B)) @ y
    dn = dual_norm(spec, y)
    if dn <= 0:
        return 0.0
    return max(0.0, float(y @ x) / dn)


def _newton_start(spec, B: np.ndarray, x: np.ndarray, b0: np.ndarray, iters: int = 40):
    """Damped Newton steps on ``sum w |x - b B|^p`` (finite p > 1).

    Only a starting point: the subgradient loop that follows certifies the
    result.  For p < 2 the curvature ``|r|^(p-2)`` is floored, which turns
    the step into an iteratively reweighted least-squares step.
    """
    p = spec.p
    w = np.ones(B.shape[1]) if spec.weights is None else np.asarray(spec.weights)
    k = B.shape[0]
    b = b0.copy()
    fb = norm(spec, x - b @ B)
    for _ in range(iters):
        r = x - b @ B
        a = np.abs(r)
        scale = a.max()
        if scale == 0:
            break
        u = a / scale  # rescaled to keep powers finite
        g = -(B @ (w * u ** (p - 1) * np.sign(r)))
        h = (p - 1) * w * np.maximum(u, 1e-12) ** (p - 2) / scale
        H = (B * h) @ B.T
        H += 1e-12 * (np.trace(H) / k + 1e-300) * np.eye(k)
        try:
            d = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(H, -g, rcond=None)[0]
        t = 1.0
        for _ in range(20):
            fn = norm(spec, x - (b + t * d) @ B)
            if fn < fb:
                break
            t *= 0.5
        else:
            break
        b, fb, gain = b + t * d, fn, fb - fn
        if gain <= 1e-13 * fb:  # converged to working precision
            break
    return b


def _subgradient(spec, B: np.ndarray, x: np.ndarray, b0: np.ndarray, D: float,
                 tol: float, max_iter: int = SUBGRAD_MAX_ITER):
    """Subgradient descent in the metric of the Gram matrix of ``B``.

    Returns the best iterate and its certified gap.
    """
    f = lambda b: norm(spec, x - b @ B)
    gram_inv = np.linalg.pinv(B @ B.T)
    proj = _annihilator_projector(B)
    b = b0.copy()
    best_b, best_f = b.copy(), f(b)
    lower = 0.0
    for k in range(1, max_iter + 1):
        r = x - b @ B
        fr = norm(spec, r)
        if fr < best_f:
            best_b, best_f = b.copy(), fr
        y = _norm_gradient(spec, r)
        lower = max(lower, _dual_lower_bound(spec, B, x, y, proj))
        if best_f - lower <= tol:
            break
        g = -(B @ y)
        d = gram_inv @ g
        gn = float(g @ d)
        if gn <= 0:
            break
        # diminishing step, capped by the Polyak step toward the certified floor
        step = D / math.sqrt(k)
        if fr > lower:
            step = min(step, (fr - lower) / gn)
        b = b - step * d
    lower = max(lower, _dual_lower_bound(spec, B, x, _norm_gradient(spec, x - best_b @ B), proj))
    return best_b, max(0.0, best_f - lower)


def chebyshev_approximant(sys: MinimalSystem, x, S, backend: str | None = None) -> ChebSolution:
    """Best approximation of ``x`` from ``span{x_i : i in S}``.

    ``backend`` may force ``"subgradient"``; by default it is chosen from
    the norm.  Only the error value is contractual, minimizers may differ
    between backends.
    """
    c = as_coeffs(sys, x)
    S = tuple(sorted(set(int(i) for i in S)))
    if S and (S[0] < 0 or S[-1] >= sys.size):
        raise IndexError(f"support {S} out of range")
    spec = sys.norm
    xa = synthesize(sys, c)
    if set(support(c)) <= set(S):
        return ChebSolution(S, c[list(S)].copy(), 0.0, "exact", 0.0)
    if not S:
        return ChebSolution(S, np.zeros(0), float(norm(spec, xa)), "exact", 0.0)
    B = sys.basis[list(S)]
    w = np.asarray(spec.weights) if spec.weights is not None else None
    kind = backend
    if kind is None:
        if spec.p == 2:
            kind = "l2"
        elif spec.p == 1:
            kind = "lp-l1"
        elif math.isinf(spec.p):
            kind = "lp-linf"
        else:
            kind = "subgradient"
    if kind == "l2":
        if spec.p != 2:
            raise ValueError("l2 backend needs p = 2")
        sw = np.sqrt(w) if w is not None else np.ones(sys.ambient_dim)
        b = np.linalg.lstsq((B * sw).T, xa * sw, rcond=None)[0]
        err = float(norm(spec, xa - b @ B))
        cert = err - _dual_lower_bound(spec, B, xa, _norm_gradient(spec, xa - b @ B))
    elif kind == "lp-l1":
        b, cert = _lp_l1(B, xa, w)
    elif kind == "lp-linf":
        b, cert = _lp_linf(B, xa)
    elif kind == "subgradient":
        if math.isinf(spec.p):
            raise ValueError("subgradient backend needs a finite p")
        xn = float(norm(spec, xa))
        D = 2 * xn / float(np.min(norm(spec, B)))
        tol = SUBGRAD_REL_GAP * max(1.0, xn)
        b0 = c[list(S)].copy()
        if backend is None:
            b0 = _newton_start(spec, B, xa, b0)
        b, cert = _subgradient(spec, B, xa, b0, D, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    err = float(norm(spec, xa - b @ B))
    return ChebSolution(S, np.asarray(b, dtype=float), err, kind, abs(float(cert)))


class ErrorTable:
    """Memo of Chebyshev and projection errors for one system.

    Keys are (coefficient bytes, support); the estimators revisit the same
    (x, S) pairs many times.
    """

    def __init__(self, sys: MinimalSystem, backend: str | None = None):
        self.sys = sys
        self.backend = backend
        self._cheb: dict = {}
        self._sigma: dict = {}
        self._tilde: dict = {}

    def cheb(self, x, S) -> float:
        x = np.asarray(x, dtype=float)
        S = tuple(sorted(S))
        key = (x.tobytes(), S)
        v = self._cheb.get(key)
        if v is None:
            v = chebyshev_approximant(self.sys, x, S, self.backend).error
            self._cheb[key] = v
        return v

    def sigma(self, x, m: int) -> MTermError:
        x = np.asarray(x, dtype=float)
        key = (x.tobytes(), m)
        v = self._sigma.get(key)
        if v is None:
            v = _sigma_m(self.sys, x, m, self.cheb)
            self._sigma[key] = v
        return v

    def sigma_tilde(self, x, m: int) -> MTermError:
        x = np.asarray(x, dtype=float)
        key = x.tobytes()
        table = self._tilde.get(key)
        if table is None:
            table = _sigma_tilde_all(self.sys, x)
            self._tilde[key] = table
        return table[m]


def _sigma_m(sys, c, m, cheb) -> MTermError:
    N = sys.size
    if not 0 <= m <= N:
        raise ValueError(f"m={m} out of range 0..{N}")
    if m == 0:
        return MTermError(0, float(sys.vec_norm(c)), ())
    if math.comb(N, m) > ENUM_CAP:
        raise ValueError(f"C({N},{m}) exceeds the enumeration cap {ENUM_CAP}")
    if len(support(c)) <= m:
        S = tuple(sorted(support(c)))
        # pad to m with the smallest unused indices, lexicographically first
        rest = [i for i in range(N) if i not in S][: m - len(S)]
        S = tuple(sorted(S + tuple(rest)))
        return MTermError(m, 0.0, S, c[list(S)].copy())
    best, best_S = math.inf, ()
    for S in itertools.combinations(range(N), m):
        e = cheb(c, S)
        if e < best:
            best, best_S = e, S
    return MTermError(m, best, best_S)


def sigma_m(sys: MinimalSystem, x, m: int, backend: str | None = None) -> MTermError:
    """Best m-term error: minimum Chebyshev error over supports of size m.

    Smaller supports are dominated by span inclusion, so only supports of
    exactly ``min(m, N)`` elements are searched.
    """
    c = as_coeffs(sys, x)
    res = _sigma_m(sys, c, m, lambda x_, S: chebyshev_approximant(sys, x_, S, backend).error)
    if res.support and res.coeffs.size == 0:
        sol = chebyshev_approximant(sys, c, res.support, backend)
        res = MTermError(m, res.value, res.support, sol.coeffs)
    return res


def _sigma_tilde_all(sys: MinimalSystem, c) -> list[MTermError]:
    """sigma-tilde_m for every m = 0..N by enumerating all index sets."""
    N = sys.size
    if 2 ** N > ENUM_CAP:
        raise ValueError(f"2^{N} subsets exceed the enumeration cap {ENUM_CAP}")
    masks = ((np.arange(2 ** N)[:, None] >> np.arange(N)) & 1).astype(bool)
    resid = np.where(masks, 0.0, c)
    errs = sys.vec_norm(resid)
    card = masks.sum(axis=1)
    sets = [tuple(int(i) for i in np.flatnonzero(row)) for row in masks]
    order = sorted(range(2 ** N), key=lambda j: (card[j], sets[j]))
    out = []
    best, best_A = math.inf, ()
    j = 0
    for m in range(N + 1):
        while j < len(order) and card[order[j]] <= m:
            e = float(errs[order[j]])
            if e < best:
                best, best_A = e, sets[order[j]]
            j += 1
        out.append(MTermError(m, best, best_A))
    return out


def sigma_tilde_m(sys: MinimalSystem, x, m: int) -> MTermError:
    """Best projection error ``min{||x - P_A x|| : |A| <= m}``."""
    c = as_coeffs(sys, x)
    if not 0 <= m <= sys.size:
        raise ValueError(f"m={m} out of range 0..{sys.size}")
    return _sigma_tilde_all(sys, c)[m]


@dataclass
class NullApproximantCheck:
    instances: int = 0
    zero_cases: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_null_approximant(sys: MinimalSystem, items, table: ErrorTable | None = None) -> NullApproximantCheck:
    """sigma_m(x) vanishes exactly when |supp x| <= m, and then x = P_supp x."""
    table = table or ErrorTable(sys)
    out = NullApproximantCheck()
    for x in np.array(items, dtype=float, ndmin=2):
        s = len(support(x))
        for m in range(1, sys.size + 1):
            out.instances += 1
            val = table.sigma(x, m).value
            if val <= ZERO_TOL:
                out.zero_cases += 1
                # x must be recovered both by the greedy sum and by the minimizer
                best = table.sigma(x, m)
                approx = np.zeros(sys.size)
                if best.coeffs.size:
                    approx[list(best.support)] = best.coeffs
                else:
                    approx = chebyshev_approximant(sys, x, best.support).full_coeffs(sys.size)
                err = max(float(sys.vec_norm(x - greedy_sum(x, m))),
                          float(sys.vec_norm(x - approx)))
                if s > m or err > 1e-8:
                    out.violations.append({"x": x.tolist(), "m": m, "sigma": val,
                                           "support": s, "recovery_error": err})
            elif s <= m:
                out.violations.append({"x": x.tolist(), "m": m, "sigma": val, "support": s})
    return out
