from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from sparseica.config import SweepConfig
from sparseica.engines import EngineParams, SparsityPenalty, create_engine
from sparseica.metrics import gini_index
from sparseica.model import DataMatrix, DemixingState


@dataclass
class Trial:
    """
    Данные одного прогона: отбеленный вход алгоритма и всё,
    что нужно для оценки результата.
    """

    Z: Optional[DataMatrix]
    truth: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Outcome:
    metric_value: float
    converged: bool
    estimate_gini: Optional[float] = None


class BaseExperiment(ABC):
    """
    Базовый класс для всех экспериментов.

    Паттерн Template Method:
    1. generate() - истинные данные для значения параметра развёртки
    2. separate() - запуск алгоритма на отбеленных данных
    3. score() - метрика по результату
    """

    name = "base"
    metric_name = "metric"
    uses_algorithms = True

    def __init__(self, cfg: SweepConfig, verbose: bool = False):
        self.cfg = cfg
        self.verbose = verbose

    @abstractmethod
    def generate(self, sweep_value: float, rng: np.random.Generator) -> Trial:
        """
        Сгенерировать данные прогона.

        Args:
            sweep_value: значение параметра развёртки
            rng: генератор, зависящий только от (эксперимент, значение, прогон)
        """
        pass

    @abstractmethod
    def score(self, trial: Trial, state: DemixingState) -> float:
        pass

    def penalty(self, sweep_value: float) -> SparsityPenalty:
        return SparsityPenalty(self.cfg.lam, self.cfg.epsilon)

    def engine_params(self, seed: int) -> EngineParams:
        return EngineParams(
            max_sweeps=self.cfg.max_sweeps,
            tol=self.cfg.tol,
            restarts=self.cfg.restarts,
            seed=seed,
            infomax_eta0=self.cfg.infomax_eta0,
        )

    def separate(self, trial: Trial, algorithm: str, sweep_value: float, seed: int) -> DemixingState:
        engine = create_engine(algorithm, self.engine_params(seed), self.penalty(sweep_value), self.verbose)
        state, _ = engine.run(trial.Z)
        return state

    def estimate_gini(self, trial: Trial, state: DemixingState) -> Optional[float]:
        """Средний индекс Джини оценок источников"""
        Y = state.W @ trial.Z.values
        return float(np.mean([gini_index(y) for y in Y]))

    def run(self, algorithm: str, sweep_value: float, data_seed: int, engine_seed: int) -> Outcome:
        """
        Основной метод: generate → separate → score.
        Исключения пробрасываются, их обрабатывает sweep.
        """
        trial = self.generate(sweep_value, np.random.default_rng(data_seed))
        state = self.separate(trial, algorithm, sweep_value, engine_seed)
        return Outcome(
            metric_value=self.score(trial, state),
            converged=bool(state.converged and not state.diverged),
            estimate_gini=self.estimate_gini(trial, state),
        )

    def export(self, trial: Trial, out_dir: str) -> str:
        """Выгрузить данные прогона (для подкоманды gen). Возвращает главный файл."""
        raise NotImplementedError(f"{self.name} does not export datasets")
