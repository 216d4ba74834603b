import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedylab.corpus import CorpusSpec
from greedylab.counterexamples import (FAMILIES, ExampleSpec, build_example, constructive_sweep,
                                       family_knowns, constructive_approximant, verify_example_claims)
from greedylab.greedy import enumerate_weak_sets, greedy_set
from greedylab.spaces import MinimalSystem, validate_system

QUICK = CorpusSpec(gaussian=6, block_max=2)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExampleSpec("Nope", 8)
    with pytest.raises(ValueError):
        ExampleSpec("L1Alpha", 8)
    with pytest.raises(ValueError):
        ExampleSpec("L1Alpha", 3, alpha=1.0)
    with pytest.raises(ValueError):
        ExampleSpec("LpVariant", 8, p=1.0)
    with pytest.raises(ValueError):
        ExampleSpec("LpVariant", 8, p=math.inf)


def test_spec_round_trip_and_factor():
    for spec in (ExampleSpec("L1Alpha", 8, alpha=2.0), ExampleSpec("SupNorm", 9),
                 ExampleSpec("LpVariant", 6, p=2.0)):
        assert ExampleSpec.from_dict(spec.to_dict()) == spec
        assert spec.family in spec.slug
    assert ExampleSpec("L1Alpha", 8, alpha=1.0).bound_factor(0.5) == 8.0
    assert ExampleSpec("SupNorm", 8).bound_factor(0.25) == 12.0
    assert ExampleSpec("LpVariant", 8, p=2.0).bound_factor(1.0) == pytest.approx(3 * math.sqrt(2))


@pytest.mark.parametrize("alpha", [1.0, 2.0, 3.0])
def test_l1_exact_norms(alpha):
    sys = build_example(ExampleSpec("L1Alpha", 8, alpha=alpha))
    assert sys.size == 7 and sys.labels == tuple(range(2, 9))
    e = np.eye(sys.size)
    assert abs(sys.vec_norm(e[0]) - (2 * alpha + 3)) <= 1e-12
    assert abs(sys.vec_norm(e[0] + e[1]) - 2.0) <= 1e-12
    # G_1(x_2 + x_3) = x_2 by the stable tie-break
    assert greedy_set(e[0] + e[1], 1) == (0,)


@pytest.mark.parametrize("family", FAMILIES)
def test_built_systems_validate(family):
    spec = ExampleSpec(family, 7, alpha=1.0 if family == "L1Alpha" else None,
                       p=3.0 if family == "LpVariant" else None)
    sys = build_example(spec)
    assert validate_system(sys).ok
    # alternating signs on the first coordinate
    assert list(np.sign(sys.basis[:, 0])) == [(-1.0) ** lab for lab in sys.labels]


def test_constructive_approximant_hand_example():
    sys = build_example(ExampleSpec("L1Alpha", 6, alpha=1.0))  # labels 2..6
    x = np.array([5.0, 4.0, 0.5, 0.2, 0.1])
    a = np.zeros(5)
    a[[2, 3]] = [7.0, -2.0]
    b = constructive_approximant(sys, x, 2, 1.0, [0, 1], [2, 3], a)
    # pairs (0 -> 2) with labels 2,4 and (1 -> 3) with labels 3,5: both even sums
    np.testing.assert_array_equal(b, [7.0, -2.0, 0.0, 0.0, 0.0])
    b = constructive_approximant(sys, x, 2, 1.0, [0, 1], [1, 2], np.array([0.0, 3.0, 7.0, 0, 0]))
    # shared index 1 copies a; pair (0 -> 2) has labels 2 and 4
    np.testing.assert_array_equal(b, [7.0, 3.0, 0.0, 0.0, 0.0])
    b = constructive_approximant(sys, x, 1, 1.0, [0], [1], np.array([0.0, 3.0, 0, 0, 0]))
    assert b[0] == -3.0  # labels 2 and 3 have odd sum


def test_constructive_approximant_errors():
    sys = build_example(ExampleSpec("SupNorm", 6))
    x = np.array([5.0, 4.0, 0.5, 0.2, 0.1])
    with pytest.raises(ValueError):
        constructive_approximant(sys, x, 2, 1.0, [0], [1, 2], np.zeros(5))
    with pytest.raises(ValueError, match="weak"):
        constructive_approximant(sys, x, 1, 1.0, [4], [0], np.zeros(5))
    W = enumerate_weak_sets(x, 2, 0.5)[-1]
    b = constructive_approximant(sys, x, 2, 0.5, W, [3, 4], np.ones(5))
    assert set(np.flatnonzero(b)) <= set(W.indices)


@settings(max_examples=150)
@given(st.sampled_from([("L1Alpha", 1.0), ("L1Alpha", 3.0), ("SupNorm", None), ("LpVariant", 2.0)]),
       st.sampled_from([1.0, 0.5, 0.25]), st.data())
def test_approximant_bound_property(fam, tau, data):
    family, par = fam
    spec = ExampleSpec(family, 7, alpha=par if family == "L1Alpha" else None,
                       p=par if family == "LpVariant" else None)
    sys = build_example(spec)
    N = sys.size
    x = np.array(data.draw(st.lists(st.integers(-6, 6), min_size=N, max_size=N)), dtype=float)
    m = data.draw(st.integers(1, N))
    sets = enumerate_weak_sets(x, m, tau)
    W = data.draw(st.sampled_from(sets))
    A = data.draw(st.permutations(range(N)))[:m]
    a = np.zeros(N)
    a[list(A)] = data.draw(st.lists(st.integers(-8, 8), min_size=m, max_size=m))
    b = constructive_approximant(sys, x, m, tau, W, A, a)
    lhs, rhs = sys.vec_norm(x - b), sys.vec_norm(x - a)
    assert lhs <= spec.bound_factor(tau) * rhs + 1e-9


@pytest.mark.parametrize("spec", [ExampleSpec("L1Alpha", 8, alpha=1.0), ExampleSpec("SupNorm", 9),
                                  ExampleSpec("LpVariant", 8, p=2.0)])
def test_sweep_passes(spec):
    for tau in (1.0, 0.5):
        res = constructive_sweep(spec, tau, trials=150, seed=1)
        assert res.ok and res.worst_slack >= -1e-9
        assert res.worst_ratio <= res.factor
    again = constructive_sweep(spec, 0.5, trials=150, seed=1)
    assert again.to_dict() == res.to_dict()


def test_sweep_flags_broken_construction():
    # same-sign perturbations defeat the parity trick in the construction
    spec = ExampleSpec("L1Alpha", 8, alpha=3.0)
    good = build_example(spec)
    B = good.basis.copy()
    B[:, 0] = np.abs(B[:, 0])
    bad = MinimalSystem(B, good.duals, good.norm, labels=good.labels)
    res = constructive_sweep(spec, 1.0, trials=300, sys=bad)
    assert not res.ok
    v = res.violations[0]
    assert v["lhs"] > 4 * v["rhs"]


def test_family_knowns():
    k = family_knowns(ExampleSpec("L1Alpha", 8, alpha=1.0), tau=0.5)
    assert k["K_s"].value == 4.0 and k["K_s"].direction == "upper"
    assert k["K_ws"].value == 8.0 and k["K_ws"].key == "K_ws(0.5)"
    assert k["K_bsg"].value == 8.0


def statuses(claims):
    return {c["claim"]: c["status"] for c in claims}


def test_verify_l1_claims():
    claims = verify_example_claims(ExampleSpec("L1Alpha", 8, alpha=1.0), trials=100,
                                   corpus_spec=QUICK, refine_rounds=10)
    st_ = statuses(claims)
    assert set(st_.values()) == {"PASS"}
    assert any("2 alpha + 3" in c for c in st_)
    claims = verify_example_claims(ExampleSpec("L1Alpha", 6, alpha=1.0), tau=0.5, trials=50,
                                   corpus_spec=QUICK, refine_rounds=0)
    st_ = statuses(claims)
    assert "FAIL" not in st_.values()
    assert list(st_.values()).count("NOT-CHECKABLE") == 1


def test_verify_sup_and_lp_claims():
    claims = verify_example_claims(ExampleSpec("SupNorm", 9), trials=100, corpus_spec=QUICK,
                                   refine_rounds=0)
    ratio = next(c for c in claims if c["claim"].startswith("democracy"))
    assert ratio["ratio"] == 4.0 and ratio["status"] == "PASS"
    assert "FAIL" not in statuses(claims).values()
    claims = verify_example_claims(ExampleSpec("LpVariant", 8, p=2.0), trials=100,
                                   corpus_spec=QUICK, refine_rounds=0)
    assert set(statuses(claims).values()) == {"PASS"}
