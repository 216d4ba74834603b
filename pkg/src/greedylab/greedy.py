"""Greedy orderings, weak thresholding sets and branch greedy algorithms.

All functions act on coefficient vectors; index sets are returned as
ascending tuples, orderings as tuples in selection order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .spaces import project

ENUM_CAP = 10**6


def greedy_ordering(c) -> tuple[int, ...]:
    """Indices by decreasing modulus; ties go to the smaller index."""
    a = np.abs(np.asarray(c, dtype=float))
    return tuple(int(i) for i in np.argsort(-a, kind="stable"))


def greedy_set(c, m: int) -> tuple[int, ...]:
    c = np.asarray(c, dtype=float)
    if not 0 <= m <= c.shape[-1]:
        raise ValueError(f"m={m} out of range 0..{c.shape[-1]}")
    return tuple(sorted(greedy_ordering(c)[:m]))


def greedy_sum(c, m: int) -> np.ndarray:
    """Coefficients of the m-term thresholding greedy approximant G_m."""
    return project(c, greedy_set(c, m))


def is_weak_set(c, S, tau: float) -> bool:
    a = np.abs(np.asarray(c, dtype=float))
    S = list(S)
    if not S:
        return True
    mask = np.zeros(a.shape[-1], dtype=bool)
    mask[S] = True
    if mask.all():
        return True
    return bool(a[mask].min() >= tau * a[~mask].max())


@dataclass(frozen=True)
class ThresholdingSet:
    indices: tuple[int, ...]
    tau: float

    @property
    def m(self) -> int:
        return len(self.indices)


def _check_tau(tau: float) -> None:
    if not 0 < tau <= 1:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")


def enumerate_weak_sets(c, m: int, tau: float) -> list[ThresholdingSet]:
    """All m-subsets S with min_S |c| >= tau * max_{not S} |c|, lexicographic."""
    c = np.asarray(c, dtype=float)
    N = c.shape[-1]
    if not 1 <= m <= N:
        raise ValueError(f"m={m} out of range 1..{N}")
    _check_tau(tau)
    if math.comb(N, m) > ENUM_CAP:
        raise ValueError(f"C({N},{m}) exceeds the enumeration cap {ENUM_CAP}")
    a = np.abs(c)
    out = []
    for S in itertools.combinations(range(N), m):
        mask = np.zeros(N, dtype=bool)
        mask[list(S)] = True
        if mask.all() or a[mask].min() >= tau * a[~mask].max():
            out.append(ThresholdingSet(S, tau))
    return out


def branch_active_set(c, tau: float) -> tuple[int, ...]:
    """Indices whose modulus is at least ``tau`` times the largest one."""
    a = np.abs(np.asarray(c, dtype=float))
    _check_tau(tau)
    top = a.max() if a.size else 0.0
    if top == 0:
        raise ValueError("active set undefined for the zero vector")
    return tuple(int(i) for i in np.flatnonzero(a >= tau * top))


@dataclass(frozen=True)
class BranchSelector:
    """Rule picking one index of the active set; ``fn(c, tau) -> index``."""

    name: str
    fn: Callable[[np.ndarray, float], int]

    def __call__(self, c, tau: float) -> int:
        return int(self.fn(np.asarray(c, dtype=float), tau))


def _greedy_pick(c, tau):
    return greedy_ordering(c)[0]


def _max_index_pick(c, tau):
    return branch_active_set(c, tau)[-1]


GREEDY_SELECTOR = BranchSelector("greedy", _greedy_pick)
MAX_INDEX_SELECTOR = BranchSelector("max-index", _max_index_pick)

SELECTORS: dict[str, BranchSelector] = {
    GREEDY_SELECTOR.name: GREEDY_SELECTOR,
    MAX_INDEX_SELECTOR.name: MAX_INDEX_SELECTOR,
}


def selector_violations(sel: BranchSelector, c, tau: float,
                        scales=(-1e3, -1.0, -1e-2, 1e-3, 10.0, 1e4),
                        rng: np.random.Generator | None = None) -> list[str]:
    """Check BG1-BG3 for ``sel`` at one nonzero coefficient vector."""
    c = np.asarray(c, dtype=float)
    out = []
    pick = sel(c, tau)
    active = branch_active_set(c, tau)
    if pick not in active:
        out.append(f"BG1: pick {pick} not in active set {active}")
    for lam in scales:
        if sel(lam * c, tau) != pick:
            out.append(f"BG2: pick changes under scaling by {lam:g}")
    # BG3: rewrite coordinates off the active set without changing it
    rng = rng or np.random.default_rng(0)
    a = np.abs(c)
    bound = tau * a.max()
    off = np.setdiff1d(np.arange(c.size), active)
    if off.size:
        d = c.copy()
        # strictly below the threshold keeps the active set unchanged
        d[off] = rng.uniform(-1, 1, off.size) * bound * 0.999
        d[off] = np.where(np.abs(d[off]) < bound, d[off], 0.0)
        if branch_active_set(d, tau) == active and sel(d, tau) != pick:
            out.append("BG3: pick depends on coordinates outside the active set")
    return out


def register_selector(sel: BranchSelector, trials: int = 200, seed: int = 0) -> BranchSelector:
    """Add ``sel`` to the registry after a randomized BG1-BG3 check."""
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        N = int(rng.integers(1, 9))
        c = rng.standard_normal(N) * (rng.random(N) < 0.8)
        if not c.any():
            c[0] = 1.0
        tau = float(rng.choice([1.0, 0.7, 0.5, 0.3]))
        bad = selector_violations(sel, c, tau, rng=rng)
        if bad:
            raise ValueError(f"selector {sel.name!r} rejected: {bad[0]}")
    SELECTORS[sel.name] = sel
    return sel


def get_selector(sel) -> BranchSelector:
    if sel is None:
        return GREEDY_SELECTOR
    if isinstance(sel, BranchSelector):
        return sel
    try:
        return SELECTORS[sel]
    except KeyError:
        raise ValueError(f"unknown selector {sel!r}") from None


def branch_ordering(c, tau: float, sel=None) -> tuple[int, ...]:
    """Indices chosen by repeatedly applying ``sel`` to the residual."""
    sel = get_selector(sel)
    r = np.array(c, dtype=float)
    if not r.any():
        raise ValueError("branch ordering undefined for the zero vector")
    _check_tau(tau)
    order = []
    for _ in range(np.count_nonzero(r)):
        i = sel(r, tau)
        order.append(i)
        r[i] = 0.0
    return tuple(order)


def branch_greedy_sum(c, tau: float, m: int, sel=None) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if not 0 <= m <= c.shape[-1]:
        raise ValueError(f"m={m} out of range 0..{c.shape[-1]}")
    if m == 0 or not c.any():
        return np.zeros_like(c)
    return project(c, branch_ordering(c, tau, sel)[:m])
