import numpy as np
import pytest
from scipy.optimize import linprog

from greedylab.simplex import CyclingGuardError, InfeasibleError, UnboundedError, solve_lp


def test_small_known_lp():
    # min -x1 - x2  s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
    c = [-1.0, -1.0, 0.0, 0.0]
    A = [[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]]
    res = solve_lp(c, A, [4.0, 6.0])
    assert res.fun == pytest.approx(-2.8)
    np.testing.assert_allclose(res.x[:2], [1.6, 1.2])
    assert abs(res.gap) < 1e-10


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_lp([1.0, 1.0], [[1.0, 1.0]], [-1.0])


def test_unbounded():
    with pytest.raises(UnboundedError):
        solve_lp([-1.0, 0.0], [[1.0, -1.0]], [1.0])


def test_iteration_guard():
    with pytest.raises(CyclingGuardError):
        solve_lp([-1.0, -1.0, 0.0, 0.0], [[1.0, 2.0, 1.0, 0.0], [3.0, 1.0, 0.0, 1.0]],
                 [4.0, 6.0], max_iter=0)


def test_degenerate_redundant_rows():
    # duplicated constraint row exercises the redundant-row removal
    A = [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0]]
    res = solve_lp([1.0, 2.0, 3.0], A, [2.0, 2.0])
    assert res.fun == pytest.approx(2.0)


def test_beale_cycling_example():
    # classic example on which Dantzig's rule cycles; Bland's rule terminates
    c = np.array([-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0])
    A = np.array([[0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                  [0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]])
    res = solve_lp(c, A, [0.0, 0.0, 1.0])
    assert res.fun == pytest.approx(-0.05)


def test_against_highs_random():
    rng = np.random.default_rng(7)
    for _ in range(300):
        m, n = rng.integers(1, 8), rng.integers(8, 20)
        A = rng.standard_normal((m, n))
        x0 = rng.random(n) * (rng.random(n) < 0.5)
        b = A @ x0
        c = rng.random(n)
        ours = solve_lp(c, A, b)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
        assert np.all(ours.x >= 0)
        np.testing.assert_allclose(A @ ours.x, b, atol=1e-8)
        # strong duality
        assert abs(ours.gap) <= 1e-8 * max(1.0, abs(ours.fun))


def test_badly_scaled_phase_one():
    # regression: roundoff in phase 1 once reported unboundedness
    rng = np.random.default_rng(5)
    for _ in range(50):
        B = np.eye(6) + 0.3 * rng.standard_normal((6, 6))
        B[0] = B[1] + 1e-4 * rng.standard_normal(6)  # near-dependent rows
        A = np.hstack([B.T, -B.T, np.eye(6), -np.eye(6)])
        b = rng.standard_normal(6)
        c = np.concatenate([np.zeros(12), np.ones(12)])
        ours = solve_lp(c, A, b)
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        assert ours.fun == pytest.approx(ref.fun, abs=1e-7)
