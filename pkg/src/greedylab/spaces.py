"""Ambient norms and finite biorthogonal (minimal) systems.

Elements of the span X of a system are carried as coefficient vectors
``c`` with ``c[i] = x_i'(x)``; ambient coordinates are produced on demand
by :func:`synthesize`.  Index sets are 0-based throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

BIORTH_TOL = 1e-10
RANK_TOL = 1e-9


@dataclass(frozen=True)
class NormSpec:
    """Descriptor of an ambient norm: ``lp``, ``linf`` or ``weighted_lp``."""

    kind: str
    p: float = 1.0
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lp", "linf", "weighted_lp"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "linf":
            object.__setattr__(self, "p", math.inf)
            object.__setattr__(self, "weights", None)
            return
        if not (self.p >= 1) or math.isinf(self.p):
            raise ValueError(f"p must be a finite real >= 1, got {self.p}")
        if self.kind == "weighted_lp":
            if not self.weights:
                raise ValueError("weighted_lp requires weights")
            w = tuple(float(v) for v in self.weights)
            if any(not (v > 0) or not math.isfinite(v) for v in w):
                raise ValueError("weights must be positive and finite")
            object.__setattr__(self, "weights", w)
        else:
            object.__setattr__(self, "weights", None)

    @classmethod
    def lp(cls, p: float) -> "NormSpec":
        if math.isinf(p):
            return cls("linf")
        return cls("lp", float(p))

    @classmethod
    def linf(cls) -> "NormSpec":
        return cls("linf")

    @classmethod
    def weighted(cls, p: float, weights: Sequence[float]) -> "NormSpec":
        return cls("weighted_lp", float(p), tuple(weights))

    @property
    def is_polyhedral(self) -> bool:
        return self.p == 1 or math.isinf(self.p)

    @property
    def dual_exponent(self) -> float:
        if self.p == 1:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def check_dim(self, n: int) -> None:
        if self.weights is not None and len(self.weights) != n:
            raise ValueError(
                f"norm has {len(self.weights)} weights, ambient dimension is {n}")

    def to_dict(self) -> dict:
        d: dict = {"type": self.kind}
        if self.kind != "linf":
            d["p"] = self.p
        if self.weights is not None:
            d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NormSpec":
        kind = d.get("type")
        if kind == "linf":
            return cls.linf()
        if kind == "lp":
            p = float(d["p"])
            return cls.lp(p)
        if kind == "weighted_lp":
            return cls.weighted(float(d["p"]), d["weights"])
        raise ValueError(f"unknown norm type {kind!r}")

    def __call__(self, v) -> float | np.ndarray:
        return norm(self, v)

    def dual(self, f) -> float | np.ndarray:
        return dual_norm(self, f)


def norm(spec: NormSpec, v) -> float | np.ndarray:
    """Norm of ``v`` along its last axis (a scalar for 1-D input)."""
    v = np.asarray(v, dtype=float)
    n = v.shape[-1]
    spec.check_dim(n)
    a = np.abs(v)
    if spec.kind == "linf":
        out = a.max(axis=-1) if n else np.zeros(v.shape[:-1])
    else:
        p = spec.p
        w = np.asarray(spec.weights) if spec.weights is not None else None
        if p == 1:
            out = (a * w).sum(axis=-1) if w is not None else a.sum(axis=-1)
        elif p == 2 and w is None:
            out = np.sqrt((a * a).sum(axis=-1))
        else:
            # scale by the max modulus to keep a**p representable
            s = a.max(axis=-1, keepdims=True) if n else np.ones(v.shape[:-1] + (1,))
            s = np.where(s > 0, s, 1.0)
            t = (a / s) ** p
            if w is not None:
                t = t * w
            out = s[..., 0] * t.sum(axis=-1) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def dual_norm(spec: NormSpec, f) -> float | np.ndarray:
    """Norm of the covector ``f`` (standard pairing) in the ambient dual."""
    f = np.asarray(f, dtype=float)
    q = spec.dual_exponent
    if spec.weights is None:
        return norm(NormSpec.lp(q), f)
    w = np.asarray(spec.weights)
    if math.isinf(q):
        out = (np.abs(f) / w).max(axis=-1)
        return float(out) if np.ndim(out) == 0 else out
    # sup{f.v : sum w|v|^p <= 1} = (sum w^(1-q) |f|^q)^(1/q)
    return norm(NormSpec.weighted(q, w ** (1.0 - q)), f)


@dataclass(frozen=True, eq=False)
class MinimalSystem:
    """A finite system ``x_1..x_N`` in an ``n``-dimensional normed space
    together with covectors ``x_1'..x_N'`` acting by the standard pairing.

    Rows of ``basis`` are the ambient coordinates of the ``x_i``; rows of
    ``duals`` those of the ``x_i'``.  Biorthogonality is *not* enforced
    here, use :func:`validate_system`.
    """

    basis: np.ndarray
    duals: np.ndarray
    norm: NormSpec
    labels: tuple | None = None
    name: str = ""

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float, ndmin=2)
        duals = np.array(self.duals, dtype=float, ndmin=2)
        if basis.ndim != 2 or basis.shape != duals.shape:
            raise ValueError(
                f"basis {basis.shape} and duals {duals.shape} must be equal N x n arrays")
        N, n = basis.shape
        if N > n:
            raise ValueError(f"system size {N} exceeds ambient dimension {n}")
        if not (np.isfinite(basis).all() and np.isfinite(duals).all()):
            raise ValueError("non-finite entries in system")
        self.norm.check_dim(n)
        if self.labels is not None:
            if len(self.labels) != N:
                raise ValueError("labels must have one entry per basis vector")
            object.__setattr__(self, "labels", tuple(self.labels))
        basis.setflags(write=False)
        duals.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "duals", duals)

    @classmethod
    def from_basis(cls, basis, norm: NormSpec, **kw) -> "MinimalSystem":
        """Square system with duals taken as the coefficient functionals."""
        basis = np.array(basis, dtype=float, ndmin=2)
        if basis.shape[0] != basis.shape[1]:
            raise ValueError(
                "duals can only be derived for a square system; supply them explicitly")
        duals = np.linalg.inv(basis).T
        return cls(basis, duals, norm, **kw)

    @classmethod
    def unit(cls, n: int, norm: NormSpec) -> "MinimalSystem":
        eye = np.eye(n)
        return cls(eye, eye, norm, name=f"unit-{n}")

    @property
    def size(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    def label(self, i: int):
        return self.labels[i] if self.labels is not None else i

    def coefficients(self, v) -> np.ndarray:
        """Dual functionals applied to ambient vector(s) ``v``."""
        return np.asarray(v, dtype=float) @ self.duals.T

    def vec_norm(self, c) -> float | np.ndarray:
        """Norm of the element(s) with coefficient vector(s) ``c``."""
        return norm(self.norm, synthesize(self, c))

    def basis_norms(self) -> np.ndarray:
        return norm(self.norm, self.basis)

    def dual_upper_norms(self) -> np.ndarray:
        return dual_norm(self.norm, self.duals)

    def to_dict(self) -> dict:
        d = {
            "ambient_dim": self.ambient_dim,
            "norm": self.norm.to_dict(),
            "basis": self.basis.tolist(),
            "duals": self.duals.tolist(),
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d


def as_coeffs(sys: MinimalSystem, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape[-1] != sys.size:
        raise ValueError(f"coefficient vector has length {c.shape[-1]}, system size is {sys.size}")
    return c


def synthesize(sys: MinimalSystem, c) -> np.ndarray:
    """Ambient coordinates of ``sum_i c_i x_i`` (batched over leading axes)."""
    return as_coeffs(sys, c) @ sys.basis


def support(c, tol: float = 0.0) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.abs(np.asarray(c)) > tol))


def _check_indices(A: Iterable[int], N: int) -> list[int]:
    idx = sorted(set(int(i) for i in A))
    if idx and (idx[0] < 0 or idx[-1] >= N):
        raise IndexError(f"index set {idx} out of range for size {N}")
    return idx


def project(c, A: Iterable[int]) -> np.ndarray:
    """Coefficient vector of ``P_A x``: ``c`` on ``A``, zero elsewhere."""
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    idx = _check_indices(A, c.shape[-1])
    out[..., idx] = c[..., idx]
    return out


def dual_norm_bounds(sys: MinimalSystem, i: int, corpus) -> tuple[float, float]:
    """Bracket ``(lower, upper)`` for the norm of ``x_i'`` restricted to X.

    ``lower`` is the best ratio ``|x_i'(x)|/||x||`` over the corpus,
    ``upper`` the exact ambient dual norm of the stored covector.
    """
    if not 0 <= i < sys.size:
        raise IndexError(i)
    items = _items(corpus)
    if len(items) == 0:
        raise ValueError("empty corpus")
    items = as_coeffs(sys, items)
    norms = sys.vec_norm(items)
    keep = norms > 0
    lower = float(np.max(np.abs(items[keep, i]) / norms[keep])) if keep.any() else 0.0
    upper = float(dual_norm(sys.norm, sys.duals[i]))
    return lower, upper


def _items(corpus) -> np.ndarray:
    items = getattr(corpus, "items", corpus)
    return np.array(items, dtype=float, ndmin=2)


def basis_constant_bounds(sys: MinimalSystem, corpus=None) -> tuple[float, float]:
    """Bracket for ``K_b = max_k ||S_k||`` with ``S_k = P_{0..k-1}``."""
    N = sys.size
    lower = 1.0
    if corpus is not None:
        items = as_coeffs(sys, _items(corpus))
        norms = sys.vec_norm(items)
        keep = norms > 0
        items, norms = items[keep], norms[keep]
        for k in range(1, N):
            part = items.copy()
            part[:, k:] = 0.0
            if len(items):
                lower = max(lower, float(np.max(sys.vec_norm(part) / norms)))
    terms = sys.basis_norms() * sys.dual_upper_norms()
    upper = float(np.max(np.cumsum(terms)))
    return lower, max(upper, lower)


def extend_with_apex(sys: MinimalSystem) -> MinimalSystem:
    """Adjoin ``x_0 = s e_{n+1}`` with ``x_0' = e_{n+1}/s`` and ``s = max ||x_i||``.

    The new vector is placed at position 0.
    """
    if sys.norm.weights is not None:
        raise ValueError("apex extension needs an unweighted norm")
    N, n = sys.basis.shape
    s = float(np.max(sys.basis_norms()))
    basis = np.zeros((N + 1, n + 1))
    duals = np.zeros((N + 1, n + 1))
    basis[0, n] = s
    duals[0, n] = 1.0 / s
    basis[1:, :n] = sys.basis
    duals[1:, :n] = sys.duals
    labels = None
    if sys.labels is not None:
        labels = ("apex",) + sys.labels
    return MinimalSystem(basis, duals, sys.norm, labels=labels,
                         name=f"apex({sys.name})" if sys.name else "apex")


@dataclass
class ValidationReport:
    biorth_residual: float
    rank: int
    size: int
    min_basis_norm: float
    max_basis_norm: float
    dual_upper: list[float]
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "biorth_residual": self.biorth_residual,
            "rank": self.rank,
            "size": self.size,
            "min_basis_norm": self.min_basis_norm,
            "max_basis_norm": self.max_basis_norm,
            "dual_upper": self.dual_upper,
            "failures": list(self.failures),
        }


def validate_system(sys: MinimalSystem) -> ValidationReport:
    gram = sys.duals @ sys.basis.T
    resid = float(np.max(np.abs(gram - np.eye(sys.size)))) if sys.size else 0.0
    rank = int(np.linalg.matrix_rank(sys.basis, tol=RANK_TOL))
    norms = sys.basis_norms()
    rep = ValidationReport(
        biorth_residual=resid,
        rank=rank,
        size=sys.size,
        min_basis_norm=float(norms.min()),
        max_basis_norm=float(norms.max()),
        dual_upper=[float(v) for v in sys.dual_upper_norms()],
    )
    if resid > BIORTH_TOL:
        rep.failures.append(f"biorthogonality residual {resid:.3e} exceeds {BIORTH_TOL:g}")
    if rank < sys.size:
        rep.failures.append(f"basis rank {rank} < size {sys.size}")
    return rep
