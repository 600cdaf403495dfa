"""
Генераторы истинных данных: GGD источники и матрицы смешивания.

Плотность GGD:

    p(x; β, σ) = η · exp(-|x|^{2β} / (2σ^{2β})),   η = β / (2^{1/(2β)} Γ(1/(2β)) σ)

β = 1 - гауссово распределение, β < 1 - более пиковое (разреженное).
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from sparseica.errors import GenerationError, ParameterError
from sparseica.metrics import gini_index

MAX_MIXING_REJECTIONS = 100


@dataclass(frozen=True)
class GgdSpec:
    """
    Параметры обобщённого гауссова распределения.

    unit_variance=True: sigma пересчитывается так, чтобы Var = 1
    (переданное значение sigma игнорируется).
    """

    beta: float
    sigma: float = 1.0
    unit_variance: bool = True

    def __post_init__(self):
        if not self.beta > 0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be > 0, got {self.sigma}")
        if self.unit_variance:
            object.__setattr__(self, "sigma", unit_variance_sigma(self.beta))

    @property
    def eta(self) -> float:
        """Нормирующая константа плотности"""
        b = self.beta
        return b / (2 ** (1 / (2 * b)) * math.gamma(1 / (2 * b)) * self.sigma)

    def variance(self) -> float:
        b = self.beta
        log_ratio = gammaln(3 / (2 * b)) - gammaln(1 / (2 * b))
        return self.sigma ** 2 * 2 ** (1 / b) * math.exp(log_ratio)

    def pdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        b = self.beta
        return self.eta * np.exp(-np.abs(x) ** (2 * b) / (2 * self.sigma ** (2 * b)))


def unit_variance_sigma(beta: float) -> float:
    """σ, при котором σ²·2^{1/β}·Γ(3/(2β))/Γ(1/(2β)) = 1"""
    log_ratio = gammaln(1 / (2 * beta)) - gammaln(3 / (2 * beta))
    return math.sqrt(math.exp(log_ratio) / 2 ** (1 / beta))


def sample_ggd(spec: GgdSpec, T: int, rng: np.random.Generator) -> np.ndarray:
    """
    x = s·σ·(2U)^{1/(2β)},  U ~ Gamma(1/(2β), 1),  s = ±1 равновероятно.
    """
    if T < 1:
        raise ParameterError(f"T must be >= 1, got {T}")
    shape = 1 / (2 * spec.beta)
    u = rng.gamma(shape, 1.0, size=T)
    signs = rng.choice([-1.0, 1.0], size=T)
    return signs * spec.sigma * (2 * u) ** shape


def sample_sources(beta: float, n_sources: int, T: int, rng: np.random.Generator) -> np.ndarray:
    """n_sources независимых GGD источников единичной дисперсии, N×T"""
    spec = GgdSpec(beta)
    return np.vstack([sample_ggd(spec, T, rng) for _ in range(n_sources)])


def average_gini_vs_beta(
    beta_grid: Sequence[float],
    n_sources: int,
    T: int,
    rng: np.random.Generator,
) -> List[Tuple[float, float]]:
    """
    Средний индекс Джини по n_sources источникам для каждого β.

    Returns:
        [(β, средний Gini), ...] в порядке beta_grid
    """
    if len(beta_grid) == 0:
        raise ParameterError("beta_grid must not be empty")
    if n_sources < 1:
        raise ParameterError(f"n_sources must be >= 1, got {n_sources}")

    table = []
    for beta in beta_grid:
        sources = sample_sources(beta, n_sources, T, rng)
        table.append((float(beta), float(np.mean([gini_index(s) for s in sources]))))
    return table


def random_mixing(N: int, rng: np.random.Generator, cond_cap: float = 100.0) -> np.ndarray:
    """
    Стандартная нормальная матрица N×N с числом обусловленности ≤ cond_cap.
    Перевыборка до MAX_MIXING_REJECTIONS раз.
    """
    if N < 1:
        raise ParameterError(f"N must be >= 1, got {N}")
    if not cond_cap >= 1:
        raise ParameterError(f"cond_cap must be >= 1, got {cond_cap}")

    for _ in range(MAX_MIXING_REJECTIONS):
        A = rng.standard_normal((N, N))
        if np.linalg.cond(A) <= cond_cap:
            return A
    raise GenerationError(
        f"No {N}x{N} mixing matrix with cond <= {cond_cap} after {MAX_MIXING_REJECTIONS} draws"
    )


if __name__ == "__main__":
    rng = np.random.default_rng(0)
    for beta, gini in average_gini_vs_beta(np.arange(0.1, 0.51, 0.05), 20, 10_000, rng):
        print(f"β={beta:.2f}: Gini={gini:.4f}")
