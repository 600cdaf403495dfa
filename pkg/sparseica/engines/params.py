"""
Параметры алгоритмов и значение стоимости.
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from sparseica.errors import ParameterError


@dataclass(frozen=True)
class SparsityPenalty:
    """
    λ_m · Σ_t √(y_t² + ε).

    lam: общий λ (float) или вектор λ_m по источникам.
    lam = 0 выключает штраф точно.
    """

    lam: Union[float, Sequence[float]] = 0.0
    epsilon: float = 1e-2

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        lam = np.asarray(self.lam, dtype=float)
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise ParameterError(f"lambda must be finite and >= 0, got {self.lam}")

    def lambda_for(self, m: int) -> float:
        lam = np.asarray(self.lam, dtype=float)
        if lam.ndim == 0:
            return float(lam)
        return float(lam[m])


@dataclass(frozen=True)
class LineSearch:
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo_c: float = 1e-4
    max_halvings: int = 40


@dataclass(frozen=True)
class EngineParams:
    """
    Общие параметры запуска.

    max_sweeps: проходов по строкам (для Infomax-NG - итераций)
    tol: порог на max_m(1 - |w_newᵀ w_old|), для Infomax-NG - на норму обновления
    infomax_eta0: начальный шаг Infomax-NG (None = 0.1/N)
    """

    max_sweeps: int = 512
    tol: float = 1e-6
    line_search: LineSearch = field(default_factory=LineSearch)
    restarts: int = 1
    seed: int = 0
    infomax_eta0: Optional[float] = None

    def __post_init__(self):
        if self.max_sweeps < 1 or self.restarts < 1 or self.line_search.max_halvings < 1:
            raise ParameterError("max_sweeps, restarts and max_halvings must be >= 1")
        if not self.tol > 0:
            raise ParameterError(f"tol must be > 0, got {self.tol}")
        if self.infomax_eta0 is not None and not self.infomax_eta0 > 0:
            raise ParameterError(f"infomax_eta0 must be > 0, got {self.infomax_eta0}")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class CostValue:
    """
    total = entropy_sum - log_det_term + sparsity_term.
    Константы C_m и H(x) не входят.
    """

    entropy_sum: float
    log_det_term: float
    sparsity_term: float = 0.0

    @property
    def total(self) -> float:
        return self.entropy_sum - self.log_det_term + self.sparsity_term
