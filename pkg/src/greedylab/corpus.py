"""Seeded test-vector corpora for the constant estimators."""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

GENERATOR_ID = "numpy.random.PCG64"

_KEYS = {
    "gaussian": "gaussian",
    "rademacher": "rademacher",
    "blocks": "block_max",
    "signs": "sign_max",
    "two_block": "two_block_max",
    "spike": "spike",
    "ratio": "spike_ratio",
    "delta": "delta",
}


@dataclass(frozen=True)
class CorpusSpec:
    gaussian: int = 0
    rademacher: int = 0
    block_max: int = 0          # all 1_A with 1 <= |A| <= block_max
    sign_max: int = 0           # all eps*1_A, eps_first = +1, not all +1
    two_block_max: int = 0      # sum_A eps x_i + s sum_C x_k, |A|,|C| <= k
    two_block_taus: tuple[float, ...] = (1.0, 0.5)
    delta: float = 0.01
    spike: int = 0
    spike_ratio: float = 0.5

    @classmethod
    def parse(cls, text: str) -> "CorpusSpec":
        """Parse ``"gaussian=50,blocks=3,taus=1:0.5"`` style strings."""
        kw: dict = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, val = part.partition("=")
            key = key.strip()
            if key == "taus":
                kw["two_block_taus"] = tuple(float(v) for v in val.split(":"))
                continue
            if key not in _KEYS:
                raise ValueError(f"unknown corpus key {key!r}")
            name = _KEYS[key]
            kw[name] = float(val) if name in ("spike_ratio", "delta") else int(val)
        return cls(**kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["two_block_taus"] = list(self.two_block_taus)
        return d


@dataclass
class Corpus:
    seed: int
    spec: CorpusSpec
    items: np.ndarray
    tags: list[str] = field(default_factory=list)
    generator: str = GENERATOR_ID

    def __len__(self) -> int:
        return len(self.items)

    def descriptor(self) -> dict:
        return {"seed": self.seed, "generator": self.generator,
                "spec": self.spec.to_dict(), "size": len(self)}

    def extended(self, items, tag: str = "user") -> "Corpus":
        items = np.array(items, dtype=float, ndmin=2)
        return Corpus(self.seed, self.spec, np.vstack([self.items, items]),
                      self.tags + [tag] * len(items), self.generator)


def _signs(k: int):
    """Sign patterns of length k with a leading +1."""
    for tail in itertools.product((1.0, -1.0), repeat=k - 1):
        yield (1.0,) + tail


def generate_corpus(N: int, spec: CorpusSpec, seed: int = 0) -> Corpus:
    """Build the corpus for a system of size ``N``; deterministic in ``seed``."""
    for name in ("block_max", "sign_max", "two_block_max"):
        if getattr(spec, name) > N:
            raise ValueError(f"{name}={getattr(spec, name)} exceeds system size {N}")
    rng = np.random.Generator(np.random.PCG64(seed))
    rows: list[np.ndarray] = []
    tags: list[str] = []

    def add(v, tag):
        v = np.asarray(v, dtype=float)
        if v.any():
            rows.append(v)
            tags.append(tag)

    for _ in range(spec.gaussian):
        add(rng.standard_normal(N), "random-gaussian")
    for _ in range(spec.rademacher):
        add(rng.choice([-1.0, 1.0], size=N), "rademacher")
    for k in range(1, spec.block_max + 1):
        for A in itertools.combinations(range(N), k):
            v = np.zeros(N)
            v[list(A)] = 1.0
            add(v, "block-indicator")
    for k in range(2, spec.sign_max + 1):
        for A in itertools.combinations(range(N), k):
            for eps in _signs(k):
                if all(e > 0 for e in eps):
                    continue
                v = np.zeros(N)
                v[list(A)] = eps
                add(v, "block-indicator")
    for ka in range(1, spec.two_block_max + 1):
        for A in itertools.combinations(range(N), ka):
            rest = [i for i in range(N) if i not in A]
            for kc in range(1, min(spec.two_block_max, len(rest)) + 1):
                for C in itertools.combinations(rest, kc):
                    for eps in _signs(ka):
                        for tau in spec.two_block_taus:
                            for s in ((1 - spec.delta) * tau, (1 + spec.delta) / tau):
                                v = np.zeros(N)
                                v[list(A)] = eps
                                v[list(C)] = s
                                add(v, "proof-pattern")
    for _ in range(spec.spike):
        v = np.zeros(N)
        order = rng.permutation(N)
        v[order[0]] = 1.0
        v[order[1:]] = spec.spike_ratio ** np.arange(1, N)
        v *= rng.choice([-1.0, 1.0], size=N)
        add(v, "proof-pattern")

    items = np.array(rows) if rows else np.zeros((0, N))
    return Corpus(seed, spec, items, tags)


def two_block_vector(N: int, A, C, eps, s: float) -> np.ndarray:
    """``sum_{i in A} eps_i e_i + s sum_{k in C} e_k`` in coefficient space."""
    if set(A) & set(C):
        raise ValueError("A and C must be disjoint")
    v = np.zeros(N)
    v[list(A)] = eps
    v[list(C)] = s
    return v


def sparse_instances(N: int, count: int, seed: int = 0) -> np.ndarray:
    """Integer-valued vectors whose support sizes cycle through ``1..N``.

    Used to probe the null-approximant property: every size is hit
    evenly and the entries are bounded away from zero.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.zeros((count, N))
    for t in range(count):
        k = t % N + 1
        idx = rng.choice(N, size=k, replace=False)
        out[t, idx] = rng.integers(1, 6, size=k) * rng.choice([-1.0, 1.0], size=k)
    return out
