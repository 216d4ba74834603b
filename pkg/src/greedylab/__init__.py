"""Numerical lab for greedy-type approximation constants of finite systems."""

__version__ = "0.1.0"

from .spaces import (MinimalSystem, NormSpec, basis_constant_bounds, extend_with_apex,  # noqa: E402
                     validate_system)
from .greedy import (branch_greedy_sum, enumerate_weak_sets, greedy_set, greedy_sum,  # noqa: E402
                     is_weak_set)
from .approximation import chebyshev_approximant, sigma_m, sigma_tilde_m  # noqa: E402
from .corpus import CorpusSpec, generate_corpus  # noqa: E402
from .constants import ConstantEstimate, estimate_all  # noqa: E402
from .counterexamples import ExampleSpec, build_example, constructive_approximant  # noqa: E402
from .inequalities import Known, check_inequalities  # noqa: E402

__all__ = [
    "MinimalSystem", "NormSpec", "basis_constant_bounds", "extend_with_apex", "validate_system",
    "branch_greedy_sum", "enumerate_weak_sets", "greedy_set", "greedy_sum", "is_weak_set",
    "chebyshev_approximant", "sigma_m", "sigma_tilde_m", "CorpusSpec", "generate_corpus",
    "ConstantEstimate", "estimate_all", "ExampleSpec", "build_example", "constructive_approximant",
    "Known", "check_inequalities",
]
