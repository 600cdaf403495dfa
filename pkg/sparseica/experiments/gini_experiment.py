import os

import numpy as np

from sparseica.datagen import average_gini_vs_beta, sample_sources
from sparseica.experiments.base_experiment import BaseExperiment, Outcome, Trial
from sparseica.metrics import gini_index
from sparseica.model import DemixingState, write_matrix_csv


class GiniExperiment(BaseExperiment):
    """
    Средний индекс Джини N источников GGD(β) длины T.
    Алгоритмы разделения не участвуют: записи помечаются как "ggd".
    """

    name = "gini_vs_beta"
    metric_name = "gini"
    uses_algorithms = False

    def generate(self, sweep_value: float, rng: np.random.Generator) -> Trial:
        return Trial(Z=None, truth={"sources": sample_sources(sweep_value, self.cfg.N, self.cfg.T, rng)})

    def score(self, trial: Trial, state: DemixingState = None) -> float:
        return float(np.mean([gini_index(s) for s in trial.truth["sources"]]))

    def run(self, algorithm: str, sweep_value: float, data_seed: int, engine_seed: int) -> Outcome:
        # те же выборки, что и generate() при этом сиде
        [(_, value)] = average_gini_vs_beta([sweep_value], self.cfg.N, self.cfg.T, np.random.default_rng(data_seed))
        return Outcome(metric_value=value, converged=True, estimate_gini=value)

    def export(self, trial: Trial, out_dir: str) -> str:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "sources.csv")
        write_matrix_csv(path, trial.truth["sources"])
        return path
