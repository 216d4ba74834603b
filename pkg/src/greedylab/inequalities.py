"""Check proved inequalities between constants against computed brackets.

Every inequality here has the form ``lhs <= f(constants)`` with ``f``
increasing in each constant.  The only conclusive comparison from search
lower bounds and constructive upper bounds is therefore
``lower(lhs) > upper(f)``, which is a FAIL.  When the lower bound does not
exceed the upper bound the entry is a PASS (the brackets are consistent);
when an upper bound for the right-hand side is missing the entry is
NOT-CHECKABLE.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .spaces import MinimalSystem, basis_constant_bounds

PASS, FAIL, NOT_CHECKABLE = "PASS", "FAIL", "NOT-CHECKABLE"
TOL = 1e-6
DIRECTIONS = ("lower", "upper", "exact")


@dataclass(frozen=True)
class Known:
    """A value supplied from outside the search, e.g. a constructive bound."""
    value: float
    direction: str = "upper"
    note: str = ""

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be one of {DIRECTIONS}, got {self.direction!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class InequalityResult:
    id: str
    statement: str
    lhs: float | None
    rhs: float | None
    status: str
    numbers: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class Brackets:
    """Lower and upper bounds per constant, merged from estimates and knowns."""

    def __init__(self, estimates=None, knowns=None, tau: float | None = None):
        self.tau = tau
        self._lo: dict[str, float] = {}
        self._hi: dict[str, float] = {}
        for src in (estimates or {}, knowns or {}):
            items = src.items() if isinstance(src, dict) else ((e.key, e) for e in src)
            for key, e in items:
                # estimates carry their own tau-qualified key
                self.add(getattr(e, "key", key), float(e.value), e.direction)

    def add(self, key: str, value: float, direction: str) -> None:
        if direction in ("lower", "exact"):
            self._lo[key] = max(self._lo.get(key, -np.inf), value)
        if direction in ("upper", "exact"):
            self._hi[key] = min(self._hi.get(key, np.inf), value)

    def _get(self, table: dict, name: str):
        if self.tau is not None:
            key = f"{name}({self.tau:g})"
            if key in table:
                return table[key]
        return table.get(name)

    def lower(self, name: str) -> float | None:
        return self._get(self._lo, name)

    def upper(self, name: str) -> float | None:
        return self._get(self._hi, name)


def _compare(id_, statement, lhs, rhs, numbers) -> InequalityResult:
    if lhs is None or rhs is None:
        status = NOT_CHECKABLE
    elif lhs > rhs + TOL * max(1.0, abs(rhs)):
        status = FAIL
    else:
        status = PASS
    return InequalityResult(id_, statement, lhs, rhs, status, numbers)


def _check(out, br, id_, statement, lhs_name, rhs_names, rhs_fn, lhs_value=None, extra=None):
    """Append one entry; ``lhs_name=None`` means ``lhs_value`` is used as given."""
    lhs = br.lower(lhs_name) if lhs_name is not None else lhs_value
    ups = {n: br.upper(n) for n in rhs_names}
    rhs = None if any(v is None for v in ups.values()) else float(rhs_fn(**ups))
    numbers = {"lhs_lower": lhs, **{f"{k}_upper": v for k, v in ups.items()}, **(extra or {})}
    out.append(_compare(id_, statement, lhs, rhs, numbers))


def check_inequalities(sys: MinimalSystem, estimates=None, knowns=None, tau: float = 1.0,
                       kb: float | None = None, apex_estimates=None,
                       which=("T2.2", "P2.3", "L4.1", "L4.6", "T5.5")) -> list[InequalityResult]:
    """Run the requested inequality families.

    ``estimates`` and ``knowns`` map names (``"K_ws(0.5)"`` or ``"K_ws"``) to
    objects with ``value`` and ``direction``.  ``kb`` overrides the computed
    upper bound of the basis constant.  ``apex_estimates`` holds estimates on
    the apex-extended system, whose original-system bounds come from
    ``knowns``.
    """
    br = Brackets(estimates, knowns, tau)
    out: list[InequalityResult] = []
    t = float(tau)
    if "T2.2" in which:
        _check(out, br, "T2.2a", "K_2q <= K_a", "K_2q", ["K_a"], lambda K_a: K_a)
        _check(out, br, "T2.2a", "K_d <= K_a", "K_d", ["K_a"], lambda K_a: K_a)
        _check(out, br, "T2.2b", "K_a <= 32 K_d (1 + K_1q)^4", "K_a", ["K_d", "K_1q"],
               lambda K_d, K_1q: 32 * K_d * (1 + K_1q) ** 4)
    if "P2.3" in which:
        _check(out, br, "P2.3", "K_hd <= M^2 tau^-2 with M = K_wag(tau)", "K_hd", ["K_wag"],
               lambda K_wag: K_wag ** 2 / t ** 2, extra={"tau": t})
        _check(out, br, "P2.3", "K_1q <= (1 + M)(1 + M^2 tau^-4) with M = K_wag(tau)", "K_1q",
               ["K_wag"], lambda K_wag: (1 + K_wag) * (1 + K_wag ** 2 / t ** 4),
               extra={"tau": t})
    if "L4.1" in which:
        norms = sys.basis_norms()
        duals = sys.dual_upper_norms()
        inf_term = float(np.min((1 + duals * norms) * norms))
        _check(out, br, "L4.1",
               "sup ||x_i|| <= 2 K_ws(tau) tau^-1 inf_j (1 + ||x_j'|| ||x_j||) ||x_j||",
               None, ["K_ws"], lambda K_ws: 2 * K_ws / t * inf_term,
               lhs_value=float(norms.max()), extra={"tau": t, "inf_term_upper": inf_term})
    if "L4.6" in which:
        ap = Brackets(apex_estimates, None, tau)
        _check(out, br, "L4.6a", "K_1q(B2) <= 2 K_1q(B1) + 1", None, ["K_1q"],
               lambda K_1q: 2 * K_1q + 1, lhs_value=ap.lower("K_1q"))
        _check(out, br, "L4.6b", "K_sd(B2) <= 4 K_sd(B1)", None, ["K_sd"],
               lambda K_sd: 4 * K_sd, lhs_value=ap.lower("K_sd"))
    if "T5.5" in which:
        kb_up = basis_constant_bounds(sys)[1] if kb is None else float(kb)
        _check(out, br, "T5.5", "K_2q <= 5 K_b^2 K_ws(tau) + 6 K_b^3 K_ws(tau)^2 tau^-2",
               "K_2q", ["K_ws"],
               lambda K_ws: 5 * kb_up ** 2 * K_ws + 6 * kb_up ** 3 * K_ws ** 2 / t ** 2,
               extra={"tau": t, "K_b_upper": kb_up})
    return out


def overall_status(results) -> str:
    statuses = [r.status if isinstance(r, InequalityResult) else r["status"] for r in results]
    if FAIL in statuses:
        return FAIL
    return PASS if PASS in statuses else NOT_CHECKABLE
