"""
Эксперименты на синтетических GGD смесях: нормированный ISR глобальной
матрицы G = W·V·A в зависимости от одного параметра.

    isr_vs_beta    - форма распределения β
    isr_vs_T       - длина выборки
    isr_vs_N       - число источников
    isr_vs_lambda  - параметр разреженности λ (подбор λ по сетке)

Смешивающая матрица и источники перевыбираются в каждом прогоне.
"""

import os

import numpy as np

from sparseica.datagen import random_mixing, sample_sources
from sparseica.engines import SparsityPenalty
from sparseica.experiments.base_experiment import BaseExperiment, Trial
from sparseica.metrics import normalized_isr
from sparseica.model import (
    DataMatrix,
    DemixingState,
    Role,
    full_demixing,
    global_matrix,
    whiten,
    write_matrix_csv,
)


class IsrExperiment(BaseExperiment):

    metric_name = "normalized_isr"
    swept = "beta"

    def setting(self, sweep_value: float):
        """(N, T, β) для данного значения развёртки"""
        N, T, beta = self.cfg.N, self.cfg.T, self.cfg.beta
        if self.swept == "beta":
            beta = sweep_value
        elif self.swept == "T":
            T = int(sweep_value)
        elif self.swept == "N":
            N = int(sweep_value)
        return N, T, beta

    def generate(self, sweep_value: float, rng: np.random.Generator) -> Trial:
        N, T, beta = self.setting(sweep_value)
        S = sample_sources(beta, N, T, rng)
        A = random_mixing(N, rng)
        X = DataMatrix(A @ S, Role.MIXTURES)
        Z, transform = whiten(X, N)
        return Trial(Z=Z, truth={"sources": S, "mixing": A, "mixtures": X, "transform": transform})

    def score(self, trial: Trial, state: DemixingState) -> float:
        G = global_matrix(full_demixing(state.W, trial.truth["transform"]), trial.truth["mixing"])
        return normalized_isr(G).normalized_isr

    def export(self, trial: Trial, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        write_matrix_csv(os.path.join(out_dir, "sources.csv"), trial.truth["sources"])
        write_matrix_csv(os.path.join(out_dir, "mixing.csv"), trial.truth["mixing"])
        path = os.path.join(out_dir, "mixtures.csv")
        write_matrix_csv(path, trial.truth["mixtures"].values)
        return path


class IsrVsBetaExperiment(IsrExperiment):
    name = "isr_vs_beta"
    swept = "beta"


class IsrVsTExperiment(IsrExperiment):
    name = "isr_vs_T"
    swept = "T"


class IsrVsNExperiment(IsrExperiment):
    name = "isr_vs_N"
    swept = "N"


class IsrVsLambdaExperiment(IsrExperiment):
    name = "isr_vs_lambda"
    swept = "lambda"

    def penalty(self, sweep_value: float) -> SparsityPenalty:
        return SparsityPenalty(sweep_value, self.cfg.epsilon)
