"""
fMRI-подобный эксперимент (пространственный ICA):

1. Сцена при заданном CNR
2. Наблюдения транспонируются: кадры - строки, пиксели - отсчёты
3. PCA-понижение до K
4. Алгоритм → K оценок пространственных карт
5. Аукцион по |corr| с истинными картами → средний |corr|
"""

import numpy as np

from sparseica.experiments.base_experiment import BaseExperiment, Trial
from sparseica.fmri_scene import export_scene, generate_fmri_scene, measured_cnr
from sparseica.metrics import pair_components
from sparseica.model import DataMatrix, DemixingState, Role, unmix, whiten


class FmriCnrExperiment(BaseExperiment):

    name = "fmri_cnr"
    metric_name = "mean_abs_corr"

    def generate(self, sweep_value: float, rng: np.random.Generator) -> Trial:
        cfg = self.cfg
        scene, observed = generate_fmri_scene(
            cfg.grid, cfg.K, cfg.T_f, cfg.baseline, sweep_value, rng, jitter=cfg.jitter,
        )
        frames = DataMatrix(observed.values.T, Role.MIXTURES)
        Z, transform = whiten(frames, cfg.K)
        return Trial(Z=Z, truth={"scene": scene, "observed": observed, "frames": frames, "transform": transform})

    def score(self, trial: Trial, state: DemixingState) -> float:
        estimates = unmix(trial.truth["frames"], state.W, trial.truth["transform"])
        _, mean_abs_corr = pair_components(trial.truth["scene"].sources(), estimates)
        return mean_abs_corr

    def export(self, trial: Trial, out_dir: str) -> str:
        scene, observed = trial.truth["scene"], trial.truth["observed"]
        print(f"📊 measured CNR = {measured_cnr(scene, observed):.4g} (target {scene.cnr:g})")
        return export_scene(scene, observed, out_dir)
