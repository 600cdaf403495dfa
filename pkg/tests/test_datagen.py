import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import chisquare, kurtosis, skew

from sparseica.datagen import (
    GgdSpec,
    average_gini_vs_beta,
    random_mixing,
    sample_ggd,
    sample_sources,
    unit_variance_sigma,
)
from sparseica.errors import ParameterError
from sparseica.metrics import gini_index


# ============================================================================
# GGD
# ============================================================================

@pytest.mark.parametrize("beta", [0.5, 0.75, 1.0, 2.0])
def test_pdf_integrates_to_one_with_unit_variance(beta):
    spec = GgdSpec(beta)
    # плотность чётная: интегрируем по полуоси
    half_mass, _ = quad(lambda x: float(spec.pdf(x)), 0, np.inf, limit=200)
    half_second, _ = quad(lambda x: x * x * float(spec.pdf(x)), 0, np.inf, limit=200)
    mass, second = 2 * half_mass, 2 * half_second
    assert mass == pytest.approx(1.0, abs=1e-6)
    assert second == pytest.approx(1.0, abs=1e-4)
    assert spec.variance() == pytest.approx(1.0, abs=1e-12)


def test_beta_one_is_standard_gaussian(rng):
    assert unit_variance_sigma(1.0) == pytest.approx(1.0, abs=1e-12)
    x = sample_ggd(GgdSpec(1.0), 100_000, rng)
    assert np.var(x) == pytest.approx(1.0, abs=0.02)
    assert kurtosis(x) == pytest.approx(0.0, abs=0.1)


def test_beta_half_kurtosis(rng):
    x = sample_ggd(GgdSpec(0.5), 100_000, rng)
    assert kurtosis(x, fisher=False) == pytest.approx(6.0, abs=0.5)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0])
def test_samples_follow_pdf(beta):
    spec = GgdSpec(beta)
    x = sample_ggd(spec, 1_000_000, np.random.default_rng(int(100 * beta)))
    inner = np.linspace(-4, 4, 41)
    probs = np.array([quad(lambda t: float(spec.pdf(t)), a, b, limit=200)[0] for a, b in zip(inner[:-1], inner[1:])])
    tail = (1.0 - probs.sum()) / 2
    expected = np.concatenate([[tail], probs, [tail]]) * x.size
    observed = np.histogram(x, bins=np.concatenate([[-np.inf], inner, [np.inf]]))[0]
    assert chisquare(observed, expected).pvalue > 0.01


def test_samples_are_sign_symmetric(rng):
    x = sample_ggd(GgdSpec(1.0, unit_variance=False), 100_000, rng)
    assert skew(x) == pytest.approx(0.0, abs=0.05)


def test_explicit_sigma_is_kept():
    assert GgdSpec(0.5, sigma=2.0, unit_variance=False).sigma == 2.0
    assert GgdSpec(0.5, sigma=2.0).sigma == pytest.approx(unit_variance_sigma(0.5))


@pytest.mark.parametrize("beta, sigma", [(0.0, 1.0), (-0.5, 1.0), (0.5, 0.0), (0.5, -2.0)])
def test_invalid_parameters(beta, sigma):
    with pytest.raises(ParameterError):
        GgdSpec(beta, sigma, unit_variance=False)


def test_sample_sources_shape_and_determinism():
    first = sample_sources(0.3, 4, 500, np.random.default_rng(1))
    second = sample_sources(0.3, 4, 500, np.random.default_rng(1))
    assert first.shape == (4, 500)
    np.testing.assert_array_equal(first, second)


# ============================================================================
# Gini vs β
# ============================================================================

def test_single_beta_single_source_equals_gini_of_draw():
    table = average_gini_vs_beta([0.3], 1, 1000, np.random.default_rng(5))
    draw = sample_sources(0.3, 1, 1000, np.random.default_rng(5))[0]
    assert table == [(0.3, pytest.approx(gini_index(draw), abs=1e-15))]


def test_empty_beta_grid():
    with pytest.raises(ParameterError):
        average_gini_vs_beta([], 2, 100, np.random.default_rng(0))


@pytest.mark.slow
def test_gini_decreases_with_beta():
    grid = np.round(np.arange(0.1, 0.51, 0.05), 2)
    table = average_gini_vs_beta(grid, 20, 10_000, np.random.default_rng(0))
    values = [gini for _, gini in table]
    assert all(a > b for a, b in zip(values, values[1:]))


@pytest.mark.slow
def test_gini_average_is_stable_across_seeds():
    grid = [0.1, 0.3, 0.5]
    first = average_gini_vs_beta(grid, 20, 10_000, np.random.default_rng(1))
    second = average_gini_vs_beta(grid, 20, 10_000, np.random.default_rng(2))
    for (_, a), (_, b) in zip(first, second):
        assert a == pytest.approx(b, abs=0.02)


# ============================================================================
# Смешивание
# ============================================================================

def test_single_mixing_coefficient_is_nonzero(rng):
    A = random_mixing(1, rng)
    assert A.shape == (1, 1)
    assert A[0, 0] != 0


def test_mixing_condition_number_is_capped(rng):
    for N in (2, 5, 10):
        for _ in range(5):
            s = np.linalg.svd(random_mixing(N, rng), compute_uv=False)
            assert s[0] / s[-1] <= 100.0 + 1e-9


def test_mixing_is_deterministic():
    np.testing.assert_array_equal(
        random_mixing(6, np.random.default_rng(9)),
        random_mixing(6, np.random.default_rng(9)),
    )


def test_mixing_rejects_bad_size(rng):
    with pytest.raises(ParameterError):
        random_mixing(0, rng)
