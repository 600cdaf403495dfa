from abc import ABC, abstractmethod
from typing import List, Optional, Tuple

import numpy as np

from sparseica.engines.params import CostValue, EngineParams
from sparseica.errors import DimensionError
from sparseica.model import DataMatrix, DemixingState, Role, random_orthogonal


class BaseEngine(ABC):
    """
    Базовый класс для всех ICA алгоритмов.

    Паттерн Template Method:
    1. initial_state() - случайная ортогональная инициализация (или заданная W)
    2. optimize() - собственно итерации алгоритма
    3. total_cost() - стоимость для выбора лучшего рестарта
    """

    name = "base"

    def __init__(self, params: EngineParams, verbose: bool = False):
        self.params = params
        self.verbose = verbose

    @abstractmethod
    def optimize(self, state: DemixingState, Z: np.ndarray) -> Tuple[DemixingState, List[CostValue]]:
        """
        Итерации алгоритма от начального состояния.

        Args:
            state: начальное состояние (W со строками единичной нормы)
            Z: отбеленные данные K×T

        Returns:
            (финальное состояние, трасса стоимости)
        """
        pass

    @abstractmethod
    def total_cost(self, W: np.ndarray, Z: np.ndarray) -> CostValue:
        pass

    def initial_state(
        self,
        n: int,
        rng: np.random.Generator,
        initial_W: Optional[np.ndarray] = None,
    ) -> DemixingState:
        W = random_orthogonal(n, rng) if initial_W is None else np.array(initial_W, dtype=float)
        if W.shape != (n, n):
            raise DimensionError(f"initial W must be {n}x{n}, got {W.shape}")
        W = W / np.linalg.norm(W, axis=1, keepdims=True)
        return DemixingState(W=W)

    def run(self, Z: DataMatrix, initial_W: Optional[np.ndarray] = None) -> Tuple[DemixingState, List[CostValue]]:
        """
        Основной метод: рестарты → optimize → лучший по стоимости.
        Несходимость не исключение: converged=False в состоянии.
        """
        if Z.role != Role.WHITENED:
            raise DimensionError(f"{self.name} expects whitened data, got role={Z.role.value}")
        Z.require_engine_ready()
        n = Z.n_rows

        if n == 1:
            state = DemixingState(W=np.ones((1, 1)), converged=True)
            return state, [self.total_cost(state.W, Z.values)]

        rng = np.random.default_rng(self.params.seed)
        best_state, best_trace, best_cost = None, [], np.inf

        for restart in range(self.params.restarts):
            start = initial_W if restart == 0 else None
            state = self.initial_state(n, rng, start)
            state, trace = self.optimize(state, Z.values)
            cost = trace[-1].total if trace else self.total_cost(state.W, Z.values).total

            if self.verbose:
                print(f"  {self.name} restart {restart + 1}/{self.params.restarts}: "
                      f"cost={cost:.6f}, sweeps={state.iteration}, converged={state.converged}")

            if best_state is None or cost < best_cost:
                best_state, best_trace, best_cost = state, trace, cost

        return best_state, best_trace
