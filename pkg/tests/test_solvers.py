import math

import numpy as np
import pytest

from cyclegap import (Ball, Box, CycleOperators, Halfspace, ProductSet, Singleton, dr_gap_solve,
                      gap_vector, km_fixed_point, membership_D, saddle_residual, support_prox)
from cyclegap.hilbert import norm
from cyclegap.scenario import bundled_scenarios, load_scenario

from conftest import pv


def intervals_ctx():
    return CycleOperators(2, 1), ProductSet([Box([-1], [1]), Box([3], [5])])


def test_km_two_intervals():
    ops, C = intervals_ctx()
    res = km_fixed_point(ops, C, pv(0, 0), alpha=0.5)
    assert res.converged and res.iterations <= 10_000
    np.testing.assert_allclose(res.z, pv(1, 3), atol=1e-8)
    assert res.fixed_point_residual <= 1e-8


def test_km_common_point_needs_no_iterations():
    ops = CycleOperators(2, 1)
    C = ProductSet([Box([0], [1]), Box([0], [1])])
    res = km_fixed_point(ops, C, pv(0.5, 0.5))
    assert res.converged and res.iterations == 0
    np.testing.assert_array_equal(res.z, pv(0.5, 0.5))


def test_km_two_balls():
    ops = CycleOperators(2, 2)
    C = ProductSet([Ball([0, 0], 1), Ball([4, 0], 1)])
    res = km_fixed_point(ops, C)
    np.testing.assert_allclose(res.z, pv((1, 0), (3, 0)), atol=1e-8)


def test_km_reports_nonconvergence():
    ops = CycleOperators(2, 2)
    C = ProductSet([Ball([0, 0], 1), Ball([4, 0], 1)])
    res = km_fixed_point(ops, C, pv((0, 5), (1, -3)), max_iters=3)
    assert not res.converged and res.iterations == 3 and res.fixed_point_residual > 1e-8


def test_km_rejects_bad_relaxation():
    ops, C = intervals_ctx()
    for alpha in (0, 1, 1.5):
        with pytest.raises(ValueError):
            km_fixed_point(ops, C, alpha=alpha)


def test_dr_two_intervals():
    ops, C = intervals_ctx()
    g = dr_gap_solve(ops, C, lam=1.0)
    assert g.converged
    np.testing.assert_allclose(g.d, pv(2, -2), atol=1e-8)
    np.testing.assert_allclose(g.v, pv(2, -2), atol=1e-8)
    np.testing.assert_allclose(ops.difference(g.e), g.d, atol=1e-9)
    assert g.y_residual <= 1e-8 and g.D_residual <= 1e-8


def test_dr_intersecting_gives_zero():
    ops = CycleOperators(2, 1)
    g = dr_gap_solve(ops, ProductSet([Box([0], [1]), Box([0], [1])]))
    np.testing.assert_allclose(g.d, 0, atol=1e-9)
    np.testing.assert_allclose(g.v, 0, atol=1e-9)


def test_dr_three_singletons(singletons):
    ops, C = singletons
    g = dr_gap_solve(ops, C)
    np.testing.assert_allclose(g.d, pv(-2, -10, 12), atol=1e-9)
    np.testing.assert_allclose(g.v, pv(10, -12, 2), atol=1e-9)


def test_dr_invariants(singletons):
    ops, C = singletons
    g = dr_gap_solve(ops, C)
    assert norm(np.sum(g.d, axis=0)) <= 1e-8
    assert norm(np.sum(g.v, axis=0)) <= 1e-8
    np.testing.assert_allclose(-ops.shift(g.v), g.d, atol=1e-15)


def test_dr_step_size_does_not_change_limit():
    ops, C = intervals_ctx()
    for lam in (0.1, 0.5, 3.0, 10.0):
        g = dr_gap_solve(ops, C, lam=lam)
        np.testing.assert_allclose(g.d, pv(2, -2), atol=1e-8)


def test_dr_reports_nonconvergence():
    ops, C = intervals_ctx()
    g = dr_gap_solve(ops, C, max_iters=2)
    assert not g.converged and g.iterations == 2


def test_dr_rejects_bad_step():
    ops, C = intervals_ctx()
    with pytest.raises(ValueError):
        dr_gap_solve(ops, C, lam=0)


def test_gap_vector_examples():
    np.testing.assert_array_equal(gap_vector(CycleOperators(2, 1), pv(2, -2)), pv(2, -2))
    np.testing.assert_array_equal(gap_vector(CycleOperators(3, 1), pv(-2, -10, 12)), pv(10, -12, 2))
    np.testing.assert_array_equal(gap_vector(CycleOperators(3, 2), np.zeros((3, 2))), 0)


def test_membership_D_examples():
    ops, C = intervals_ctx()
    r = membership_D(ops, C, pv(2, -2))
    assert (r.sigma, r.value, r.in_D) == (-4, 0, True)
    r = membership_D(ops, C, pv(0, 0))
    assert r.value == 0 and r.in_D
    assert not membership_D(ops, C, pv(1, 1)).in_D


def test_membership_D_infinite_support():
    ops = CycleOperators(2, 2)
    C = ProductSet([Halfspace([0, 1], 0), Ball([1, 3], 1)])
    r = membership_D(ops, C, pv((1, 0), (-1, 0)))
    assert r.sigma == math.inf and not r.in_D


def test_saddle_residual_examples(intervals):
    ops, C = intervals
    g = dr_gap_solve(ops, C)
    assert saddle_residual(ops, C, g.d, g.e, [g.e]) == pytest.approx(0, abs=1e-9)
    probes = list(C.sample_points(50, seed=1)) + [pv(1, 3), ops.zeros()]
    assert saddle_residual(ops, C, g.d, g.e, probes) <= 1e-8
    # hand value for the true cycle probe: -4.2 + 0.21 + 4 = 0.01
    d_bad = pv(2.1, -2.1)
    e_bad = ops.inverse_difference(d_bad)
    assert saddle_residual(ops, C, d_bad, e_bad, [pv(1, 3)]) == pytest.approx(0.01, abs=1e-12)


def test_saddle_residual_precondition(intervals):
    ops, C = intervals
    with pytest.raises(ValueError):
        saddle_residual(ops, C, pv(2, -2), pv(0, 0), [])


def test_moreau_identity(rng):
    C = ProductSet([Ball([0, 1], 2), Box([-1, 0], [0, 3]), Halfspace([1, 1], 2)])
    for _ in range(200):
        x = 5 * rng.standard_normal(C.shape)
        lam = rng.uniform(0.1, 10)
        np.testing.assert_allclose(support_prox(C, x, lam) + lam * C.project(x / lam), x, atol=1e-12)


def test_prox_is_resolvent_of_support(rng):
    # p = prox(x) satisfies (x - p)/lam in subdiff sigma(p): sigma(p) = <p, (x - p)/lam>
    C = ProductSet([Ball([0, 1], 2), Box([-1, 0], [0, 3])])
    for _ in range(50):
        x, lam = 4 * rng.standard_normal(C.shape), rng.uniform(0.1, 10)
        p = support_prox(C, x, lam)
        g = (x - p) / lam
        assert C.contains(g, 1e-12)
        assert C.support(p) == pytest.approx(float(np.vdot(p, g)), abs=1e-9)


@pytest.mark.parametrize("name", [s[:-5] for s in bundled_scenarios()])
def test_solvers_agree_on_bundled(name):
    sc = load_scenario(name)
    ops, C = sc.ops, sc.product
    g = dr_gap_solve(ops, C)
    assert g.converged
    np.testing.assert_allclose(ops.difference(ops.inverse_difference(g.d)), g.d, atol=1e-9)
    for seed in range(3):
        x0 = 4 * np.random.default_rng(seed).standard_normal(ops.shape)
        z = km_fixed_point(ops, C, x0)
        assert z.converged
        assert norm(ops.difference(z.z) - g.d) <= 1e-6
        assert norm(z.z - C.project(ops.shift(z.z))) <= 1e-8
        assert norm(ops.difference(z.z) - g.d) <= 1e-7
    c0 = C.sample_points(100, seed=5)
    assert np.all(norm(g.d) <= 2 * np.linalg.norm(c0.reshape(100, -1), axis=1) + 1e-8)


def _cvx_sets(sets, n):
    import cvxpy as cp

    a, b = cp.Variable(n), cp.Variable(n)
    cons = []
    for s, var in zip(sets, (a, b)):
        if isinstance(s, Ball):
            cons.append(cp.norm(var - s.center) <= s.radius)
        else:
            cons += [var >= s.lower, var <= s.upper]
    return cp, a, b, cons


@pytest.mark.parametrize("seed", range(8))
def test_two_set_gap_matches_distance_oracle(seed):
    """For two sets, d_1 is the least-norm element of C_2 - C_1."""
    pytest.importorskip("cvxpy")
    rng = np.random.default_rng(seed)
    n = 3
    sets = []
    for _ in range(2):
        if rng.random() < 0.5:
            sets.append(Ball(4 * rng.standard_normal(n), rng.uniform(0.5, 2)))
        else:
            lo = 4 * rng.standard_normal(n)
            sets.append(Box(lo, lo + rng.uniform(0.5, 2, n)))
    ops, C = CycleOperators(2, n), ProductSet(sets)
    g = dr_gap_solve(ops, C)
    d1 = g.d[0]

    cp, a, b, cons = _cvx_sets(sets, n)
    dist = cp.Problem(cp.Minimize(cp.norm(b - a)), cons).solve(solver=cp.CLARABEL)
    cp, a, b, cons = _cvx_sets(sets, n)
    miss = cp.Problem(cp.Minimize(cp.norm(b - a - d1)), cons).solve(solver=cp.CLARABEL)
    assert norm(d1) == pytest.approx(dist, abs=1e-6)
    assert miss <= 1e-6
