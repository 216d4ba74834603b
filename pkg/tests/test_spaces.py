import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from greedylab.counterexamples import ExampleSpec, build_example
from greedylab.spaces import (MinimalSystem, NormSpec, basis_constant_bounds, dual_norm,
                              dual_norm_bounds, extend_with_apex, norm, project, support,
                              synthesize, validate_system)
from oracles import lp_norm, weighted_lp_norm

finite = st.floats(-1e3, 1e3, allow_nan=False)


def l1_example(alpha=1.0, N=6):
    return build_example(ExampleSpec("L1Alpha", N, alpha=alpha))


# -- norms ---------------------------------------------------------------

def test_norm_examples():
    assert norm(NormSpec.linf(), np.ones(5)) == 1.0
    assert norm(NormSpec.lp(1), [4, 3, 1]) == 8.0
    e = np.zeros(4)
    e[1], e[0] = 1.0, 4.0  # e_2 + 4 e_1
    assert norm(NormSpec.lp(1), e) == 5.0


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 7.5, math.inf])
def test_norm_matches_oracle(p):
    rng = np.random.default_rng(3)
    spec = NormSpec.linf() if math.isinf(p) else NormSpec.lp(p)
    for _ in range(50):
        v = rng.standard_normal(6) * 10 ** rng.uniform(-3, 3)
        assert norm(spec, v) == pytest.approx(lp_norm(v, p), rel=1e-12)


def test_weighted_norm_and_dual():
    w = [1.0, 2.0, 0.5]
    spec = NormSpec.weighted(3, w)
    v = np.array([1.0, -2.0, 4.0])
    assert norm(spec, v) == pytest.approx(weighted_lp_norm(v, 3, w), rel=1e-12)
    # duality: f.v <= ||f||_* ||v|| with equality at the norming covector
    rng = np.random.default_rng(0)
    for _ in range(200):
        f, u = rng.standard_normal(3), rng.standard_normal(3)
        assert f @ u <= dual_norm(spec, f) * norm(spec, u) + 1e-12
    spec1 = NormSpec.weighted(1, w)
    assert dual_norm(spec1, [1.0, 1.0, 1.0]) == pytest.approx(2.0)


def test_norm_large_p_no_overflow():
    v = np.array([1e200, 1e200])
    assert norm(NormSpec.lp(4), v) == pytest.approx(1e200 * 2 ** 0.25)


@pytest.mark.parametrize("bad", [lambda: NormSpec.lp(0.5),
                                 lambda: NormSpec.weighted(2, [1.0, -1.0]),
                                 lambda: NormSpec.weighted(2, [1.0, 0.0])])
def test_norm_spec_invariants(bad):
    with pytest.raises(ValueError):
        bad()


def test_norm_dimension_mismatch():
    with pytest.raises(ValueError):
        norm(NormSpec.weighted(2, [1, 1, 1]), [1.0, 2.0])


def test_norm_spec_round_trip():
    for spec in (NormSpec.lp(1), NormSpec.linf(), NormSpec.lp(3), NormSpec.weighted(2, [1, 3])):
        assert NormSpec.from_dict(spec.to_dict()) == spec


@given(p=st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]),
       u=arrays(float, 5, elements=finite), v=arrays(float, 5, elements=finite),
       lam=st.floats(-1e3, 1e3, allow_nan=False))
def test_norm_axioms(p, u, v, lam):
    spec = NormSpec.linf() if math.isinf(p) else NormSpec.lp(p)
    assert norm(spec, u + v) <= norm(spec, u) + norm(spec, v) + 1e-12 * (1 + norm(spec, u) + norm(spec, v))
    assert norm(spec, lam * u) == pytest.approx(abs(lam) * norm(spec, u), rel=1e-12, abs=1e-300)


def test_norm_axioms_bulk():
    rng = np.random.default_rng(11)
    for spec in (NormSpec.lp(1), NormSpec.lp(2.5), NormSpec.linf()):
        U = rng.standard_normal((10_000, 4))
        V = rng.standard_normal((10_000, 4))
        lam = rng.standard_normal(10_000)
        assert np.all(norm(spec, U + V) <= norm(spec, U) + norm(spec, V) + 1e-12)
        np.testing.assert_allclose(norm(spec, lam[:, None] * U), np.abs(lam) * norm(spec, U),
                                   rtol=1e-12)


# -- systems -------------------------------------------------------------

def test_synthesize_examples():
    sys = l1_example()
    assert np.all(synthesize(sys, np.zeros(sys.size)) == 0)
    for i in range(sys.size):
        d = np.zeros(sys.size)
        d[i] = 1.0
        np.testing.assert_array_equal(synthesize(sys, d), sys.basis[i])
    c = np.zeros(sys.size)
    c[:2] = 1.0
    expected = np.zeros(sys.ambient_dim)
    expected[1] = expected[2] = 1.0  # e_2 + e_3
    np.testing.assert_allclose(synthesize(sys, c), expected)


def test_synthesize_length_mismatch():
    with pytest.raises(ValueError):
        synthesize(MinimalSystem.unit(3, NormSpec.lp(1)), [1.0, 2.0])


@given(arrays(float, 5, elements=finite))
def test_coefficients_reconstruct(c):
    sys = l1_example(N=6)
    x = synthesize(sys, c)
    back = sys.coefficients(x)
    assert np.max(np.abs(back - c)) <= 1e-9 * max(1.0, norm(sys.norm, x))


def test_system_shape_checks():
    with pytest.raises(ValueError):
        MinimalSystem(np.eye(3), np.eye(2), NormSpec.lp(1))
    with pytest.raises(ValueError):
        MinimalSystem(np.ones((3, 2)), np.ones((3, 2)), NormSpec.lp(1))
    with pytest.raises(ValueError):
        MinimalSystem(np.array([[np.nan, 0], [0, 1]]), np.eye(2), NormSpec.lp(1))
    with pytest.raises(ValueError):
        MinimalSystem.from_basis(np.ones((2, 3)), NormSpec.lp(1))


def test_system_is_immutable():
    sys = MinimalSystem.unit(2, NormSpec.lp(2))
    with pytest.raises(ValueError):
        sys.basis[0, 0] = 3.0


def test_from_basis_duals():
    B = np.array([[1.0, 1.0], [0.0, 2.0]])
    sys = MinimalSystem.from_basis(B, NormSpec.lp(2))
    np.testing.assert_allclose(sys.duals @ B.T, np.eye(2), atol=1e-14)


# -- projections -----------------------------------------------------------

def test_project_examples():
    c = np.array([4.0, 3.0, 1.0])
    assert np.all(project(c, []) == 0)
    np.testing.assert_array_equal(project(c, [0]), [4, 0, 0])
    r = c - project(c, [1, 2])
    np.testing.assert_array_equal(project(c, [1, 2]), [0, 3, 1])
    assert MinimalSystem.unit(3, NormSpec.lp(1)).vec_norm(r) == 4.0
    np.testing.assert_array_equal(project(c, range(3)), c)
    with pytest.raises(IndexError):
        project(c, [3])


@given(arrays(float, 6, elements=finite), st.sets(st.integers(0, 5)), st.sets(st.integers(0, 5)))
def test_project_nested(c, A, extra):
    B = A | extra
    np.testing.assert_array_equal(project(project(c, B), A), project(c, A))
    np.testing.assert_array_equal(project(project(c, A), A), project(c, A))


def test_support():
    assert support([0.0, 2.0, 0.0, -1.0]) == (1, 3)
    assert support([0.0, 0.0]) == ()


# -- brackets ----------------------------------------------------------------

def test_dual_norm_bounds():
    sys = MinimalSystem.unit(4, NormSpec.lp(1))
    corpus = np.eye(4)
    for i in range(4):
        assert dual_norm_bounds(sys, i, corpus) == (1.0, 1.0)
    ex = l1_example()
    rng = np.random.default_rng(0)
    items = rng.standard_normal((200, ex.size))
    lo, hi = dual_norm_bounds(ex, 0, items)
    assert hi == 1.0
    assert 0 < lo <= hi + 1e-9
    with pytest.raises(ValueError):
        dual_norm_bounds(ex, 0, np.zeros((0, ex.size)))
    with pytest.raises(IndexError):
        dual_norm_bounds(ex, ex.size, items)


def test_basis_constant_bounds():
    n = 5
    lo, hi = basis_constant_bounds(MinimalSystem.unit(n, NormSpec.lp(1)), np.eye(n) + 0.5)
    assert lo == pytest.approx(1.0) and hi == pytest.approx(n)
    lo, _ = basis_constant_bounds(MinimalSystem.unit(n, NormSpec.linf()),
                                  np.random.default_rng(1).standard_normal((50, n)))
    assert lo == pytest.approx(1.0)
    ex = l1_example(1.0, 6)
    w = np.zeros(ex.size)
    w[:2] = 1.0
    lo, hi = basis_constant_bounds(ex, [w])
    assert lo >= 2.5 - 1e-12
    assert lo <= hi


# -- apex and validation ----------------------------------------------------

def test_apex_unit():
    B2 = extend_with_apex(MinimalSystem.unit(2, NormSpec.lp(1)))
    assert B2.size == 3 and B2.ambient_dim == 3
    assert validate_system(B2).ok


def test_apex_l1_example():
    ex = l1_example(1.0, 6)
    B2 = extend_with_apex(ex)
    assert B2.basis[0, -1] == 5.0
    assert B2.labels[0] == "apex"
    assert validate_system(B2).ok


@pytest.mark.parametrize("spec", [NormSpec.lp(1), NormSpec.lp(2), NormSpec.lp(3), NormSpec.linf()])
def test_apex_norm_identity(spec):
    rng = np.random.default_rng(2)
    sys = MinimalSystem.from_basis(np.eye(3) + 0.4 * rng.standard_normal((3, 3)), spec)
    B2 = extend_with_apex(sys)
    x0, f0 = B2.basis[0], B2.duals[0]
    assert abs(norm(spec, x0) * dual_norm(spec, f0) - 1.0) <= 1e-12
    assert norm(spec, x0) == pytest.approx(sys.basis_norms().max(), rel=1e-15)
    assert validate_system(B2).ok


def test_apex_rejects_weighted():
    sys = MinimalSystem.unit(2, NormSpec.weighted(2, [1.0, 2.0]))
    with pytest.raises(ValueError):
        extend_with_apex(sys)


def test_validate_unit_and_perturbed():
    rep = validate_system(MinimalSystem.unit(4, NormSpec.lp(2)))
    assert rep.ok and rep.biorth_residual == 0.0 and rep.rank == 4
    duals = np.eye(4)
    duals[1, 2] = 1e-3
    rep = validate_system(MinimalSystem(np.eye(4), duals, NormSpec.lp(2)))
    assert not rep.ok
    assert rep.biorth_residual == pytest.approx(1e-3)


def test_validate_rank_deficient():
    B = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    rep = validate_system(MinimalSystem(B, B, NormSpec.lp(2)))
    assert any("rank" in f for f in rep.failures)


def test_validate_sup_example():
    # e_i +/- e_1 all have sup norm 1
    rep = validate_system(build_example(ExampleSpec("SupNorm", 6)))
    assert rep.ok
    assert rep.min_basis_norm == 1.0 and rep.max_basis_norm == 1.0


@pytest.mark.parametrize("spec", [ExampleSpec("L1Alpha", 5, alpha=2.0), ExampleSpec("SupNorm", 7),
                                  ExampleSpec("LpVariant", 6, p=3.0)])
def test_shipped_constructions_biorthogonal(spec):
    sys = build_example(spec)
    assert validate_system(sys).biorth_residual <= 1e-10
    assert validate_system(extend_with_apex(sys)).biorth_residual <= 1e-10
