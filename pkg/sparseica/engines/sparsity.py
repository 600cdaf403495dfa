"""
Сглаженная ℓ1-норма (сумма мультиквадратичных функций) и её градиент.
"""

import numpy as np

from sparseica.errors import DimensionError, ParameterError


def smoothed_l1(y: np.ndarray, epsilon: float) -> float:
    """Σ_t √(y_t² + ε)"""
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DimensionError(f"smoothed_l1 expects a vector, got shape {y.shape}")
    return float(np.sum(np.sqrt(y * y + epsilon)))


def smoothed_l1_gradient(y: np.ndarray, Z: np.ndarray, epsilon: float) -> np.ndarray:
    """
    ∇_w Σ_t √(y_t² + ε) при y = wᵀZ:
    Σ_t y_t / √(y_t² + ε) · z_t (x(t) под суммой - поотсчётно).
    """
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be > 0, got {epsilon}")
    y = np.asarray(y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2 or y.ndim != 1 or Z.shape[1] != y.size:
        raise DimensionError(f"Shapes do not match: y{y.shape}, Z{Z.shape}")
    return Z @ (y / np.sqrt(y * y + epsilon))
