import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cyclegap import CycleOperators, cyclic_shift_matrix, identity_violations, isometry_defect
from cyclegap.hilbert import inner_product, norm

from conftest import pv


def ops3():
    return CycleOperators(3, 1)


def brute_force_inverse_difference(ops, y):
    # the defining sum, term by term
    return sum(i * ops.shift(y, i) for i in range(1, ops.m)) / ops.m


def test_context_requires_two_sets():
    with pytest.raises(ValueError, match="m must be"):
        CycleOperators(1, 2)
    with pytest.raises(ValueError):
        CycleOperators(2, 0)


def test_shift_examples():
    ops = ops3()
    np.testing.assert_array_equal(ops.shift(pv(1, 2, 3)), pv(3, 1, 2))
    np.testing.assert_array_equal(CycleOperators(2, 2).shift(pv((1, 0), (0, 1))), pv((0, 1), (1, 0)))
    x = np.arange(12.0).reshape(4, 3)
    np.testing.assert_array_equal(CycleOperators(4, 3).shift(x, 4), x)


def test_difference_examples():
    np.testing.assert_array_equal(ops3().difference(pv(1, 2, 3)), pv(2, -1, -1))
    np.testing.assert_array_equal(ops3().difference(pv(7, 7, 7)), np.zeros((3, 1)))
    np.testing.assert_array_equal(CycleOperators(2, 1).difference(pv(1, 3)), pv(2, -2))


def test_average_examples():
    ops = ops3()
    np.testing.assert_array_equal(ops.average(pv(1, 2, 3)), pv(2, 2, 2))
    np.testing.assert_allclose(ops.average(pv(-1, 4, -3)), 0, atol=1e-15)
    np.testing.assert_array_equal(ops.average(pv(5, 5, 5)), pv(5, 5, 5))


def test_inverse_difference_examples():
    ops = ops3()
    np.testing.assert_allclose(ops.inverse_difference(pv(-1, 0, 1)), pv(1 / 3, 1 / 3, -2 / 3), atol=1e-15)
    np.testing.assert_array_equal(ops.inverse_difference(np.zeros((3, 1))), np.zeros((3, 1)))
    np.testing.assert_allclose(ops.inverse_difference(pv(1, 2, 3)), pv(7 / 3, 7 / 3, 4 / 3), atol=1e-15)


@pytest.mark.parametrize("m", range(2, 8))
def test_inverse_difference_matches_defining_sum(m, rng):
    ops = CycleOperators(m, 3)
    for _ in range(20):
        x = rng.standard_normal(ops.shape)
        np.testing.assert_allclose(ops.inverse_difference(x), brute_force_inverse_difference(ops, x),
                                   atol=1e-12)


def test_project_balanced_examples():
    ops = ops3()
    np.testing.assert_array_equal(ops.project_balanced(pv(1, 2, 3)), pv(-1, 0, 1))
    np.testing.assert_array_equal(ops.project_balanced(pv(-1, 0, 1)), pv(-1, 0, 1))
    np.testing.assert_array_equal(ops.project_balanced(pv(4, 4, 4)), np.zeros((3, 1)))


def test_project_balanced_is_orthogonal(rng):
    ops = CycleOperators(5, 2)
    x, z = rng.standard_normal((2, 5, 2))
    p = ops.project_balanced(x)
    assert abs(inner_product(x - p, ops.project_balanced(z))) < 1e-12


def test_shape_errors():
    with pytest.raises(ValueError):
        ops3().shift(np.zeros((2, 1)))


def test_isometry_defect_examples(rng):
    M = cyclic_shift_matrix(3)
    for _ in range(10):
        assert abs(isometry_defect(M, rng.standard_normal(3))) <= 1e-12
    assert isometry_defect(2 * np.eye(1), np.array([1.0])) == pytest.approx(3)
    assert isometry_defect(np.array([[0, 1], [0, 0]]), np.array([1.0, 0])) == pytest.approx(-1)


def test_isometry_defect_equals_norm_change(rng):
    for _ in range(20):
        M = rng.standard_normal((4, 4))
        x = rng.standard_normal(4)
        assert isometry_defect(M, x) == pytest.approx(norm(M @ x) ** 2 - norm(x) ** 2, abs=1e-10)


def test_isometry_defect_sign_for_contraction(rng):
    M = 0.9 * np.linalg.qr(rng.standard_normal((3, 3)))[0]
    assert all(isometry_defect(M, rng.standard_normal(3)) <= 0 for _ in range(50))


def test_shift_matrix_agrees_with_block_shift(rng):
    ops = CycleOperators(4, 3)
    x = rng.standard_normal(ops.shape)
    np.testing.assert_array_equal(cyclic_shift_matrix(4, 3) @ x.ravel(), ops.shift(x).ravel())
    np.testing.assert_array_equal(ops.as_matrix(ops.shift), cyclic_shift_matrix(4, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_identity_suite_property(m, n, seed):
    worst = identity_violations(m, n, trials=3, seed=seed)
    assert max(worst.values()) <= 1e-10, worst
