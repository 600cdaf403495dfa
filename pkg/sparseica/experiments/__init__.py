"""
Протоколы экспериментов.

Доступные эксперименты:
1. GiniExperiment - индекс Джини GGD источников от β
2. IsrVs*Experiment - нормированный ISR от β, T, N или λ
3. FmriCnrExperiment - средний |corr| карт от CNR
"""

from .base_experiment import BaseExperiment, Outcome, Trial
from .fmri_experiment import FmriCnrExperiment
from .gini_experiment import GiniExperiment
from .isr_experiment import (
    IsrVsBetaExperiment,
    IsrVsLambdaExperiment,
    IsrVsNExperiment,
    IsrVsTExperiment,
)

EXPERIMENTS = {
    "gini_vs_beta": GiniExperiment,
    "isr_vs_beta": IsrVsBetaExperiment,
    "isr_vs_T": IsrVsTExperiment,
    "isr_vs_N": IsrVsNExperiment,
    "isr_vs_lambda": IsrVsLambdaExperiment,
    "fmri_cnr": FmriCnrExperiment,
}


def create_experiment(cfg, verbose: bool = False) -> BaseExperiment:
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment: {cfg.experiment}. Available: {list(EXPERIMENTS.keys())}")
    return EXPERIMENTS[cfg.experiment](cfg, verbose)


__all__ = [
    'EXPERIMENTS',
    'BaseExperiment',
    'FmriCnrExperiment',
    'GiniExperiment',
    'IsrVsBetaExperiment',
    'IsrVsLambdaExperiment',
    'IsrVsNExperiment',
    'IsrVsTExperiment',
    'Outcome',
    'Trial',
    'create_experiment',
]
