import numpy as np
import pytest

from sparseica.engines.sparsity import smoothed_l1, smoothed_l1_gradient
from sparseica.errors import DimensionError, ParameterError


def test_smoothed_l1_of_zero_vector():
    assert smoothed_l1(np.zeros(10), 0.01) == pytest.approx(1.0, abs=1e-12)


def test_smoothed_l1_tends_to_l1_norm():
    assert smoothed_l1(np.array([3.0, -4.0]), 1e-12) == pytest.approx(7.0, abs=1e-5)


def test_smoothed_l1_bounds_l1_norm_from_above(rng):
    y = rng.laplace(size=200)
    for epsilon in (1e-1, 1e-2, 1e-4):
        assert smoothed_l1(y, epsilon) >= np.sum(np.abs(y))


def test_smoothed_l1_rejects_nonpositive_epsilon():
    with pytest.raises(ParameterError):
        smoothed_l1(np.ones(3), 0.0)
    with pytest.raises(ParameterError):
        smoothed_l1_gradient(np.ones(3), np.ones((2, 3)), -1.0)


def test_gradient_at_zero_is_zero(rng):
    Z = rng.normal(size=(3, 20))
    np.testing.assert_array_equal(smoothed_l1_gradient(np.zeros(20), Z, 0.01), np.zeros(3))


def test_gradient_single_sample_is_sign_times_z():
    grad = smoothed_l1_gradient(np.array([2.0]), np.array([[2.0], [0.0]]), 1e-12)
    np.testing.assert_allclose(grad, [2.0, 0.0], atol=1e-9)


def test_gradient_matches_finite_differences(rng):
    Z = rng.normal(size=(4, 50))
    w = rng.normal(size=4)
    epsilon = 1e-2
    grad = smoothed_l1_gradient(w @ Z, Z, epsilon)

    step = 1e-6
    numeric = np.empty(4)
    for i in range(4):
        e = np.zeros(4)
        e[i] = step
        numeric[i] = (smoothed_l1((w + e) @ Z, epsilon) - smoothed_l1((w - e) @ Z, epsilon)) / (2 * step)
    np.testing.assert_allclose(grad, numeric, rtol=1e-6, atol=1e-7)


def test_gradient_shape_mismatch(rng):
    with pytest.raises(DimensionError):
        smoothed_l1_gradient(np.ones(5), rng.normal(size=(2, 4)), 0.01)
