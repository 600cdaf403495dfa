import numpy as np
import pytest

from sparseica.errors import DegenerateDemixingError, DimensionError, RankError
from sparseica.model import (
    DataMatrix,
    DemixingState,
    Role,
    center,
    decoupling_vector,
    full_demixing,
    global_matrix,
    random_orthogonal,
    read_matrix_csv,
    unmix,
    whiten,
    write_matrix_csv,
)


# ============================================================================
# center / whiten
# ============================================================================

def test_center_small_example():
    centered, mean = center(DataMatrix([[1.0, 3.0]]))
    np.testing.assert_array_equal(centered.values, [[-1.0, 1.0]])
    np.testing.assert_array_equal(mean, [2.0])


def test_center_zeros():
    centered, mean = center(DataMatrix(np.zeros((3, 5))))
    assert np.all(centered.values == 0)
    np.testing.assert_array_equal(mean, np.zeros(3))


def test_center_random_rows_have_zero_mean_and_restore(rng):
    X = DataMatrix(rng.normal(5.0, 3.0, size=(4, 100)))
    centered, mean = center(X)
    assert np.max(np.abs(centered.values.mean(axis=1))) < 1e-12
    np.testing.assert_allclose(centered.values + mean[:, None], X.values, atol=1e-12)


def test_center_is_idempotent(rng):
    once, _ = center(DataMatrix(rng.normal(size=(3, 50))))
    twice, mean = center(once)
    np.testing.assert_allclose(twice.values, once.values, atol=1e-14)
    assert np.max(np.abs(mean)) < 1e-14


def test_center_empty_matrix():
    with pytest.raises(DimensionError):
        center(DataMatrix(np.zeros((2, 0))))


def test_whiten_standard_normal(rng):
    Z, transform = whiten(DataMatrix(rng.standard_normal((2, 20_000))), 2)
    assert Z.role == Role.WHITENED
    np.testing.assert_allclose(Z.covariance(), np.eye(2), atol=1e-6)
    np.testing.assert_allclose(transform.eigenvalues, [1.0, 1.0], atol=5e-2)


def test_whiten_hand_example():
    # ковариация diag(4, 1) при нормировке 1/T
    X = DataMatrix([[2.0, -2.0, 2.0, -2.0], [1.0, 1.0, -1.0, -1.0]])
    Z, transform = whiten(X, 2)
    np.testing.assert_allclose(transform.eigenvalues, [4.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(Z.covariance(), np.eye(2), atol=1e-10)


def test_whiten_full_rank_is_invertible(rng):
    X = DataMatrix(rng.normal(size=(3, 3)) @ rng.normal(size=(3, 500)))
    Z, transform = whiten(X, 3)
    assert transform.projection.shape == (3, 3)
    assert transform.kept_rank == 3
    assert abs(np.linalg.det(transform.projection)) > 0
    np.testing.assert_allclose(transform.apply(X.values), Z.values, atol=1e-10)


def test_whiten_reduces_rank(rng):
    X = DataMatrix(rng.normal(size=(5, 2)) @ rng.normal(size=(2, 1000)) + 1e-3 * rng.normal(size=(5, 1000)))
    Z, transform = whiten(X, 2)
    assert Z.n_rows == 2
    np.testing.assert_allclose(Z.covariance(), np.eye(2), atol=1e-6)
    assert np.all(np.diff(transform.eigenvalues) <= 0)


def test_whiten_twice_gives_orthogonal_projection(rng):
    X = DataMatrix(rng.normal(size=(3, 3)) @ rng.laplace(size=(3, 2000)))
    Z, _ = whiten(X, 3)
    _, second = whiten(Z, 3)
    V = second.projection
    np.testing.assert_allclose(V @ V.T, np.eye(3), atol=1e-6)


def test_whiten_rank_deficiency_names_index(rng):
    base = rng.normal(size=(2, 200))
    X = DataMatrix(np.vstack([base, base[0] + base[1]]))
    with pytest.raises(RankError) as excinfo:
        whiten(X, 3)
    assert excinfo.value.index == 2


def test_require_engine_ready_rejects_tall_matrix():
    with pytest.raises(DimensionError):
        DataMatrix(np.ones((5, 3))).require_engine_ready()


# ============================================================================
# decoupling_vector
# ============================================================================

def test_decoupling_identity():
    np.testing.assert_allclose(decoupling_vector(np.eye(3), 0), [1.0, 0.0, 0.0], atol=1e-12)


def test_decoupling_hand_example():
    h = decoupling_vector(np.array([[1.0, 0.0], [1.0, 1.0]]), 1)
    np.testing.assert_allclose(h, [0.0, 1.0], atol=1e-12)


def test_decoupling_random_residuals(rng):
    W = random_orthogonal(6, rng) + 0.3 * rng.normal(size=(6, 6))
    for m in range(6):
        h = decoupling_vector(W, m)
        others = np.delete(W, m, axis=0)
        assert np.max(np.abs(others @ h)) < 1e-8
        assert np.linalg.norm(h) == pytest.approx(1.0, abs=1e-12)
        assert h @ W[m] > 0


def test_decoupling_scale_covariant(rng):
    W = rng.normal(size=(4, 4))
    h = decoupling_vector(W, 0)
    scaled = W.copy()
    scaled[2] *= -7.5
    np.testing.assert_allclose(decoupling_vector(scaled, 0), h, atol=1e-8)


def test_decoupling_degenerate_rows():
    W = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 2.0, 0.0]])
    with pytest.raises(DegenerateDemixingError):
        decoupling_vector(W, 0)


def test_demixing_state_invariants(rng):
    state = DemixingState(W=random_orthogonal(4, rng))
    off_diagonal = state.decoupling @ state.W.T - np.diag(np.diag(state.decoupling @ state.W.T))
    assert np.max(np.abs(off_diagonal)) < 1e-8
    copy = state.copy()
    copy.W[0, 0] = 42.0
    assert state.W[0, 0] != 42.0


# ============================================================================
# global_matrix и обратная проекция
# ============================================================================

def test_global_matrix_inverse(rng):
    A = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    np.testing.assert_allclose(global_matrix(np.linalg.inv(A), A), np.eye(3), atol=1e-10)


def test_global_matrix_identity_and_naive_product(rng):
    A = rng.normal(size=(3, 3))
    W = rng.normal(size=(3, 3))
    np.testing.assert_array_equal(global_matrix(np.eye(3), A), A)
    naive = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                naive[i, j] += W[i, k] * A[k, j]
    np.testing.assert_allclose(global_matrix(W, A), naive, atol=1e-12)


def test_global_matrix_dimension_mismatch():
    with pytest.raises(DimensionError):
        global_matrix(np.eye(2), np.eye(3))


def test_unmix_matches_whitened_domain(rng):
    X = DataMatrix(rng.normal(size=(3, 3)) @ rng.laplace(size=(3, 400)))
    Z, transform = whiten(X, 3)
    W = random_orthogonal(3, rng)
    Y = unmix(X, W, transform)
    assert Y.role == Role.ESTIMATES
    np.testing.assert_allclose(Y.values, W @ Z.values, atol=1e-10)
    np.testing.assert_allclose(full_demixing(W, transform), W @ transform.projection)


# ============================================================================
# CSV
# ============================================================================

def test_matrix_csv_round_trip(tmp_path, rng):
    values = rng.normal(size=(3, 4))
    path = tmp_path / "m.csv"
    write_matrix_csv(str(path), values)
    np.testing.assert_array_equal(read_matrix_csv(str(path)), values)


def test_matrix_csv_rejects_ragged_rows(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3\n4,5\n")
    with pytest.raises(DimensionError, match="line 2"):
        read_matrix_csv(str(path))
