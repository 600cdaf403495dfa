"""
Модель данных и предобработка, общие для всех алгоритмов.

Что здесь:
1. DataMatrix - матрица N×T с ролью (sources / mixtures / whitened / estimates)
2. center / whiten - центрирование и PCA-отбеливание с понижением размерности
3. decoupling_vector - вектор h_m, ортогональный всем строкам W кроме w_m
4. global_matrix - G = W·A для метрик разделения
5. CSV ввод/вывод матриц

Ковариация везде с нормировкой 1/T.
"""

import csv
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from sparseica.errors import DegenerateDemixingError, DimensionError, RankError


class Role(str, Enum):
    SOURCES = "sources"
    MIXTURES = "mixtures"
    WHITENED = "whitened"
    ESTIMATES = "estimates"


@dataclass(frozen=True)
class DataMatrix:
    """
    Матрица данных: строки - каналы/источники, столбцы - отсчёты.
    """

    values: np.ndarray
    role: Role = Role.MIXTURES

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2:
            raise DimensionError(f"DataMatrix expects a 2-D array, got ndim={values.ndim}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "role", Role(self.role))

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    def covariance(self) -> np.ndarray:
        centered = self.values - self.values.mean(axis=1, keepdims=True)
        return centered @ centered.T / self.n_samples

    def require_engine_ready(self):
        """Проверка перед подачей в ICA: n_rows ≥ 1 и широкая матрица"""
        if self.n_rows < 1 or self.n_samples < self.n_rows:
            raise DimensionError(
                f"ICA input must satisfy n_samples >= n_rows >= 1, "
                f"got {self.n_rows}x{self.n_samples}"
            )


@dataclass(frozen=True)
class WhiteningTransform:
    """
    Z = V·(X - mean). V имеет размер K×N.
    """

    projection: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray

    @property
    def kept_rank(self) -> int:
        return self.projection.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        return self.projection @ (np.asarray(X, dtype=float) - self.mean[:, None])


@dataclass
class DemixingState:
    """
    Текущее состояние разделения в отбеленной области.

    W: строки w_m единичной нормы
    decoupling: строки h_m (h_mᵀw_n = 0 при n≠m)
    """

    W: np.ndarray
    decoupling: np.ndarray = field(default=None)
    iteration: int = 0
    converged: bool = False
    diverged: bool = False

    def __post_init__(self):
        self.W = np.array(self.W, dtype=float)
        if self.decoupling is None:
            self.refresh_decoupling()

    @property
    def n_sources(self) -> int:
        return self.W.shape[0]

    def refresh_decoupling(self, m: int = None):
        """Пересчитать h_m (или все h, если m не задан)"""
        if self.decoupling is None:
            self.decoupling = np.zeros_like(self.W)
        rows = range(self.n_sources) if m is None else [m]
        for idx in rows:
            self.decoupling[idx] = decoupling_vector(self.W, idx)

    def copy(self) -> "DemixingState":
        return DemixingState(
            W=self.W.copy(),
            decoupling=self.decoupling.copy(),
            iteration=self.iteration,
            converged=self.converged,
            diverged=self.diverged,
        )


# ============================================================================
# ПРЕДОБРАБОТКА
# ============================================================================

def center(X: DataMatrix) -> Tuple[DataMatrix, np.ndarray]:
    """Вычесть среднее по каждой строке. Возвращает (центрированные данные, среднее)"""
    if X.values.size == 0:
        raise DimensionError("Cannot center an empty matrix")
    mean = X.values.mean(axis=1)
    centered = X.values - mean[:, None]
    # повторное вычитание убирает остаточную ошибку округления
    centered = centered - centered.mean(axis=1, keepdims=True)
    return DataMatrix(centered, X.role), mean


def whiten(X: DataMatrix, kept_rank: int) -> Tuple[DataMatrix, WhiteningTransform]:
    """
    PCA-отбеливание с сохранением kept_rank главных направлений.

    Args:
        X: данные (центрируются здесь же, среднее хранится в трансформе)
        kept_rank: сколько собственных направлений оставить

    Returns:
        (Z с ролью whitened, WhiteningTransform)
    """
    if X.values.size == 0:
        raise DimensionError("Cannot whiten an empty matrix")
    if not 1 <= kept_rank <= X.n_rows:
        raise DimensionError(f"kept_rank must lie in [1, {X.n_rows}], got {kept_rank}")

    centered, mean = center(X)
    cov = centered.values @ centered.values.T / X.n_samples
    cov = (cov + cov.T) / 2

    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    threshold = 1e-12 * max(eigenvalues[0], 0.0)
    for idx in range(kept_rank):
        if eigenvalues[idx] <= threshold or eigenvalues[idx] <= 0:
            raise RankError(
                f"Rank deficiency: eigenvalue #{idx} = {eigenvalues[idx]:.3e} "
                f"is below the tolerance for kept_rank={kept_rank}",
                index=idx,
            )

    kept = eigenvectors[:, :kept_rank]
    projection = (kept / np.sqrt(eigenvalues[:kept_rank])).T
    Z = projection @ centered.values

    transform = WhiteningTransform(projection=projection, mean=mean, eigenvalues=eigenvalues)
    return DataMatrix(Z, Role.WHITENED), transform


# ============================================================================
# МАТРИЧНЫЕ УТИЛИТЫ
# ============================================================================

def decoupling_vector(W: np.ndarray, m: int) -> np.ndarray:
    """
    Единичный вектор h_m ⟂ всем строкам W, кроме w_m.

    Берём полный QR от транспонированной матрицы остальных строк:
    последний столбец Q ортогонален их span. Знак: h_mᵀw_m > 0.
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise DimensionError(f"W must be square, got shape {W.shape}")
    n = W.shape[0]
    if not 0 <= m < n:
        raise DimensionError(f"Row index {m} out of range for {n}x{n} W")

    w_m = W[m]
    if n == 1:
        h = np.ones(1)
    else:
        others = np.delete(W, m, axis=0)
        q, r = np.linalg.qr(others.T, mode="complete")
        diag = np.abs(np.diag(r))
        scale = np.max(np.abs(others))
        if scale == 0 or np.min(diag) <= 1e-12 * scale * n:
            raise DegenerateDemixingError(
                f"Rows other than {m} are rank deficient; decoupling vector undefined"
            )
        h = q[:, -1]
        h = h / np.linalg.norm(h)

    if h @ w_m < 0:
        h = -h
    return h


def global_matrix(W: np.ndarray, A: np.ndarray) -> np.ndarray:
    """G = W·A"""
    W = np.asarray(W, dtype=float)
    A = np.asarray(A, dtype=float)
    if W.ndim != 2 or A.ndim != 2 or W.shape[1] != A.shape[0]:
        raise DimensionError(f"Cannot multiply W{W.shape} by A{A.shape}")
    if W.shape[0] != W.shape[1] or A.shape[0] != A.shape[1]:
        raise DimensionError("global_matrix expects square W and A")
    return W @ A


def full_demixing(W: np.ndarray, transform: WhiteningTransform) -> np.ndarray:
    """Демиксинг в исходных координатах: W·V"""
    return np.asarray(W, dtype=float) @ transform.projection


def unmix(X: DataMatrix, W: np.ndarray, transform: WhiteningTransform) -> DataMatrix:
    """Оценки источников по сырым смесям"""
    Y = np.asarray(W, dtype=float) @ transform.apply(X.values)
    return DataMatrix(Y, Role.ESTIMATES)


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Случайная ортогональная матрица (QR от стандартной нормальной)"""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


# ============================================================================
# CSV
# ============================================================================

def read_matrix_csv(path: str) -> np.ndarray:
    """CSV без заголовка, построчно. Рваные строки - ошибка."""
    rows = []
    width = None
    with open(path, newline="") as f:
        for line_num, row in enumerate(csv.reader(f), 1):
            if not row:
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DimensionError(
                    f"{path}: ragged row at line {line_num} ({len(row)} values, expected {width})"
                )
            try:
                rows.append([float(value) for value in row])
            except ValueError as e:
                raise DimensionError(f"{path}: non-numeric value at line {line_num}: {e}")
    if not rows:
        raise DimensionError(f"{path}: empty matrix file")
    return np.array(rows, dtype=float)


def write_matrix_csv(path: str, values: np.ndarray):
    values = np.atleast_2d(np.asarray(values, dtype=float))
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        for row in values:
            writer.writerow([repr(float(v)) for v in row])
