"""Dense two-phase tableau simplex with Bland's rule, for small LPs.

Solves ``min c.x  s.t.  A x = b, x >= 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


class CyclingGuardError(LPError):
    """Raised when the iteration cap trips."""


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    y: np.ndarray          # equality-constraint multipliers
    basis: list[int]
    iterations: int
    gap: float = 0.0       # primal minus dual objective


def _pivot(T: np.ndarray, r: int, k: int) -> None:
    T[r] /= T[r, k]
    col = T[:, k].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: list[int], ncols: int, tol: float,
         max_iter: int, it0: int, bounded: bool = False) -> int:
    """Bland-rule pivots on tableau ``T`` (objective in the last row).

    Reduced costs are compared against ``tol`` scaled by the column size,
    so roundoff in badly scaled tableaus does not pass for descent.  With
    ``bounded`` (phase 1) a column without a positive entry can only be
    roundoff and is skipped.
    """
    m = T.shape[0] - 1
    it = it0
    while True:
        red = T[m, :ncols]
        scale = 1.0 + np.abs(T[:m, :ncols]).max(axis=0, initial=0.0)
        cand = np.flatnonzero(red < -tol * scale)
        k = -1
        for j in cand:
            col = T[:m, j]
            pos = np.flatnonzero(col > tol)
            if pos.size:
                k = int(j)
                break
            if not bounded:
                raise UnboundedError("objective unbounded below")
        if k < 0:
            return it
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, k)
        basis[r] = k
        it += 1
        if it > max_iter:
            raise CyclingGuardError(f"simplex exceeded {max_iter} pivots")


def solve_lp(c, A, b, tol: float = 1e-11, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float, ndmin=2)
    b = np.array(b, dtype=float)
    m, n = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # crash basis: columns that are a positive multiple of a unit vector
    basis = [-1] * m
    nz = np.abs(A) > 0
    single = np.flatnonzero(nz.sum(axis=0) == 1)
    for j in single:
        i = int(np.flatnonzero(nz[:, j])[0])
        if basis[i] < 0 and A[i, j] > 0:
            basis[i] = int(j)
    art_rows = [i for i in range(m) if basis[i] < 0]
    na = len(art_rows)

    T = np.zeros((m + 1, n + na + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    for i in range(m):
        if basis[i] >= 0:
            T[i] /= A[i, basis[i]]
    for a, i in enumerate(art_rows):
        T[i, n + a] = 1.0
        basis[i] = n + a

    it = 0
    scale = max(1.0, float(np.abs(b).max()) if m else 1.0)
    if na:
        T[m, :] = 0.0
        for i in art_rows:
            T[m] -= T[i]
        T[m, n:n + na] = 0.0
        it = _run(T, basis, n + na, tol, max_iter, it, bounded=True)
        if -T[m, -1] > 1e-9 * scale:
            raise InfeasibleError("no feasible point")
        # drive artificials out of the basis; drop redundant rows
        keep = []
        for r in range(m):
            if basis[r] >= n:
                row = T[r, :n]
                cand = np.flatnonzero(np.abs(row) > 1e-9)
                if cand.size == 0:
                    continue
                k = int(cand[0])
                _pivot(T, r, k)
                basis[r] = k
            keep.append(r)
        T = np.vstack([T[keep][:, list(range(n)) + [n + na]], np.zeros((1, n + 1))])
        basis = [basis[r] for r in keep]
        rows = keep
    else:
        rows = list(range(m))

    mm = len(basis)
    T[mm, :n] = c
    T[mm, -1] = 0.0
    for r in range(mm):
        T[mm] -= c[basis[r]] * T[r]
    it = _run(T, basis, n, tol, max_iter, it)

    x = np.zeros(n)
    for r in range(mm):
        x[basis[r]] = T[r, -1]
    x[x < 0] = 0.0
    fun = float(c @ x)

    y = np.zeros(m)
    if mm:
        AB = A[rows][:, basis]
        try:
            yr = np.linalg.solve(AB.T, c[basis])
        except np.linalg.LinAlgError:
            yr = np.linalg.lstsq(AB.T, c[basis], rcond=None)[0]
        y[rows] = yr
    y = y * sign
    return LPResult(x=x, fun=fun, y=y, basis=list(basis), iterations=it,
                    gap=fun - float(y @ (b * sign)))
