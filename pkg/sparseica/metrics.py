"""
Метрики качества разделения и разреженности.

1. gini_index - индекс Джини (0 - равные модули, → 1 - максимально разреженный)
2. auction_assign - аукцион Бертсекаса с ε-масштабированием (максимизация)
3. pair_components - сопоставление оценок и истинных источников по |корреляции|
4. normalized_isr - средний ISR по строкам глобальной матрицы, делённый на N-1
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from sparseica.errors import DegenerateSeparationError, DimensionError, MetricError
from sparseica.model import DataMatrix


def gini_index(y: np.ndarray) -> float:
    """
    GI = 1 - 2·Σ_k (c_(k)/‖y‖₁)·((T - k + ½)/T), c_(k) - модули по возрастанию.
    """
    c = np.sort(np.abs(np.asarray(y, dtype=float).ravel()))
    total = c.sum()
    if c.size == 0 or total == 0:
        raise MetricError("Gini index is undefined for an all-zero vector")
    T = c.size
    k = np.arange(1, T + 1)
    return float(1 - 2 * np.sum((c / total) * ((T - k + 0.5) / T)))


# ============================================================================
# АУКЦИОН
# ============================================================================

@dataclass(frozen=True)
class Assignment:
    """mapping[i] - истинный индекс для оценки i"""

    mapping: np.ndarray
    total_score: float
    per_pair_scores: np.ndarray


def _auction_phase(score: np.ndarray, prices: np.ndarray, eps: float) -> np.ndarray:
    """
    Один проход аукциона (Гаусс-Зейдель: по одному участнику).
    prices изменяются на месте.
    """
    n = score.shape[0]
    owner = np.full(n, -1)
    assigned = np.full(n, -1)
    unassigned = list(range(n))

    while unassigned:
        bidder = unassigned.pop()
        values = score[bidder] - prices
        best = int(np.argmax(values))
        best_value = values[best]
        values[best] = -np.inf
        second_value = np.max(values)

        prices[best] += best_value - second_value + eps

        previous = owner[best]
        if previous >= 0:
            assigned[previous] = -1
            unassigned.append(previous)
        owner[best] = bidder
        assigned[bidder] = best

    return assigned


def auction_assign(score: np.ndarray, eps_auction: Optional[float] = None) -> Assignment:
    """
    Назначение максимальной суммарной оценки.

    Args:
        score: квадратная матрица N×N (строки - оценки, столбцы - истинные)
        eps_auction: финальный ε (по умолчанию 1e-3/N); сумма в пределах
            N·eps_auction от оптимума
    """
    score = np.asarray(score, dtype=float)
    if score.ndim != 2 or score.shape[0] != score.shape[1] or score.size == 0:
        raise DimensionError(f"auction_assign expects a non-empty square matrix, got {score.shape}")
    if not np.all(np.isfinite(score)):
        raise MetricError("Score matrix contains non-finite entries")

    n = score.shape[0]
    eps_final = eps_auction if eps_auction is not None else 1e-3 / n
    if not eps_final > 0:
        raise MetricError(f"eps_auction must be > 0, got {eps_auction}")

    if n == 1:
        mapping = np.zeros(1, dtype=int)
    else:
        prices = np.zeros(n)
        eps = max(np.max(np.abs(score)) / 2, eps_final)
        while True:
            mapping = _auction_phase(score, prices, eps)
            if eps <= eps_final:
                break
            eps = max(eps / 4, eps_final)

    per_pair = score[np.arange(n), mapping]
    return Assignment(mapping=mapping, total_score=float(per_pair.sum()), per_pair_scores=per_pair)


# ============================================================================
# СОПОСТАВЛЕНИЕ КОМПОНЕНТ
# ============================================================================

def _standardized_rows(values: np.ndarray, label: str) -> np.ndarray:
    centered = values - values.mean(axis=1, keepdims=True)
    std = np.sqrt(np.mean(centered ** 2, axis=1))
    for row, value in enumerate(std):
        if value == 0:
            raise MetricError(f"{label} row {row} has zero variance", row=row)
    return centered / std[:, None]


def abs_correlation(S_true: DataMatrix, Y_est: DataMatrix) -> np.ndarray:
    """|corr| для всех пар (оценка i, истинный j), нормировка 1/T"""
    if S_true.n_samples != Y_est.n_samples:
        raise DimensionError(
            f"Sample counts differ: true {S_true.n_samples}, estimated {Y_est.n_samples}"
        )
    s = _standardized_rows(S_true.values, "true")
    y = _standardized_rows(Y_est.values, "estimated")
    return np.abs(y @ s.T) / S_true.n_samples


def pair_components(
    S_true: DataMatrix,
    Y_est: DataMatrix,
    eps_auction: Optional[float] = None,
) -> Tuple[Assignment, float]:
    """
    Returns:
        (назначение оценка → истинный источник, средний |corr| по парам)
    """
    if S_true.n_rows != Y_est.n_rows:
        raise DimensionError(f"Row counts differ: true {S_true.n_rows}, estimated {Y_est.n_rows}")
    score = np.minimum(abs_correlation(S_true, Y_est), 1.0)
    assignment = auction_assign(score, eps_auction)
    return assignment, float(np.mean(assignment.per_pair_scores))


# ============================================================================
# ISR
# ============================================================================

@dataclass(frozen=True)
class IsrReport:
    normalized_isr: float
    per_row_isr: np.ndarray
    permutation_used: np.ndarray


def normalized_isr(G: np.ndarray) -> IsrReport:
    """
    Перестановка π - аукцион по |G|.
    ISR_m = Σ_{n≠π(m)} g²_mn / g²_{mπ(m)},  итог = Σ_m ISR_m / (N(N-1)).
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.size == 0:
        raise DimensionError(f"normalized_isr expects a non-empty square matrix, got {G.shape}")
    n = G.shape[0]
    if n == 1:
        if G[0, 0] == 0:
            raise DegenerateSeparationError("Global matrix is zero")
        return IsrReport(0.0, np.zeros(1), np.zeros(1, dtype=int))

    magnitude = np.abs(G)
    scale = np.max(magnitude)
    # точность выбора перестановки относительно масштаба G
    eps = 1e-9 * scale / n if scale > 0 else None
    permutation = auction_assign(magnitude, eps).mapping

    rows = np.arange(n)
    on_target = G[rows, permutation] ** 2
    zero_rows = np.flatnonzero(on_target == 0)
    if zero_rows.size:
        raise DegenerateSeparationError(
            f"Global matrix has a zero matched entry in row {int(zero_rows[0])}"
        )
    mask = np.ones_like(G, dtype=bool)
    mask[rows, permutation] = False
    energy = np.sum(np.where(mask, G ** 2, 0.0), axis=1)
    per_row = energy / on_target
    return IsrReport(float(np.sum(per_row) / (n * (n - 1))), per_row, permutation)
