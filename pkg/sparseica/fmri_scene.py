"""
Синтетические fMRI-подобные сцены для пространственного ICA.

Сцена:
- K пространственных карт: изотропные гауссовы пятна g×g, пик 1,
  попарное перекрытие (нормированное скалярное произведение) < 0.5
- K временных рядов длины T_f: сглаженный белый шум (скользящее
  среднее, окно 5), ортогонализованный, единичной дисперсии
- сигнал пикселя: baseline + contrast·Σ_k a_k·map_k·tc_k(t)
- шум Райса: √((s + n₁)² + n₂²), n₁, n₂ ~ N(0, noise_sigma²)

CNR: std по времени бесшумного сигнала самого активного пикселя,
делённое на noise_sigma. cnr = inf даёт сцену без шума.
"""

import math
import os
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import ujson
from scipy.ndimage import uniform_filter1d

from sparseica.errors import ParameterError, SceneError
from sparseica.model import DataMatrix, Role, write_matrix_csv

MAX_PLACEMENT_ATTEMPTS = 10_000
MAX_OVERLAP = 0.5
CONTRAST_FRACTION = 0.02
SMOOTHING_WINDOW = 5


@dataclass
class FmriScene:
    grid: int
    n_components: int
    maps: np.ndarray
    baseline: float
    timecourses: np.ndarray
    cnr: float
    noise_sigma: float
    amplitudes: np.ndarray
    contrast: float
    jitter: float = 0.05

    @property
    def n_frames(self) -> int:
        return self.timecourses.shape[1]

    def flat_maps(self) -> np.ndarray:
        """K×g² карты, строка на компоненту"""
        return self.maps.reshape(self.n_components, -1)

    def sources(self) -> DataMatrix:
        """Истинные пространственные источники для сопоставления"""
        return DataMatrix(self.flat_maps(), Role.SOURCES)

    def noise_free_signal(self) -> np.ndarray:
        """g²×T_f"""
        weighted = self.contrast * self.amplitudes[:, None] * self.flat_maps()
        return self.baseline + weighted.T @ self.timecourses


def _blob(grid: int, center: Tuple[int, int], width: float) -> np.ndarray:
    rows, cols = np.mgrid[0:grid, 0:grid]
    distance2 = (rows - center[0]) ** 2 + (cols - center[1]) ** 2
    return np.exp(-distance2 / (2 * width ** 2))


def _overlap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(a * b) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _place_maps(grid: int, K: int, rng: np.random.Generator) -> np.ndarray:
    """Отбраковка центров пятен до выполнения ограничения перекрытия"""
    maps = []
    attempts = 0
    while len(maps) < K:
        attempts += 1
        if attempts > MAX_PLACEMENT_ATTEMPTS:
            raise SceneError(
                f"Could not place {K} blobs on a {grid}x{grid} grid with overlap < {MAX_OVERLAP}"
            )
        width = grid / 20 * rng.uniform(0.75, 1.25)
        margin = int(math.ceil(2 * width))
        center = (int(rng.integers(margin, grid - margin)), int(rng.integers(margin, grid - margin)))
        candidate = _blob(grid, center, width)
        if all(_overlap(candidate, other) < MAX_OVERLAP for other in maps):
            maps.append(candidate)
    return np.stack(maps)


def _timecourses(K: int, T_f: int, rng: np.random.Generator) -> np.ndarray:
    """Сглаженный шум → центрирование → QR: строки ортогональны, дисперсия 1"""
    noise = rng.standard_normal((K, T_f))
    smooth = uniform_filter1d(noise, size=SMOOTHING_WINDOW, axis=1, mode="nearest")
    smooth = smooth - smooth.mean(axis=1, keepdims=True)
    q, _ = np.linalg.qr(smooth.T)
    return q.T * math.sqrt(T_f)


def generate_fmri_scene(
    g: int,
    K: int,
    T_f: int,
    baseline: float,
    cnr: float,
    rng: np.random.Generator,
    jitter: float = 0.05,
) -> Tuple[FmriScene, DataMatrix]:
    """
    Сгенерировать сцену и зашумлённые наблюдения.

    Args:
        g: размер сетки (g ≥ 32)
        K: число компонент (K ≤ 30, K ≤ T_f)
        T_f: число кадров
        baseline: фоновая интенсивность (> 0)
        cnr: целевой CNR (> 0, math.inf - без шума)
        rng: генератор случайных чисел
        jitter: относительный разброс амплитуд компонент у субъекта

    Returns:
        (FmriScene, DataMatrix g²×T_f с ролью mixtures)
    """
    errors = []
    if g < 32:
        errors.append(f"grid must be >= 32, got {g}")
    if not 1 <= K <= 30:
        errors.append(f"K must lie in [1, 30], got {K}")
    if T_f < K:
        errors.append(f"T_f must be >= K, got T_f={T_f}, K={K}")
    if not baseline > 0:
        errors.append(f"baseline must be > 0, got {baseline}")
    if not cnr > 0:
        errors.append(f"cnr must be > 0, got {cnr}")
    if not 0 <= jitter < 1:
        errors.append(f"jitter must lie in [0, 1), got {jitter}")
    if errors:
        raise ParameterError("; ".join(errors))

    maps = _place_maps(g, K, rng)
    timecourses = _timecourses(K, T_f, rng)
    amplitudes = 1 + jitter * rng.uniform(-1, 1, size=K)

    scene = FmriScene(
        grid=g,
        n_components=K,
        maps=maps,
        baseline=float(baseline),
        timecourses=timecourses,
        cnr=float(cnr),
        noise_sigma=0.0,
        amplitudes=amplitudes,
        contrast=CONTRAST_FRACTION * baseline,
        jitter=jitter,
    )

    signal = scene.noise_free_signal()
    peak_std = float(np.max(signal.std(axis=1)))
    scene.noise_sigma = 0.0 if math.isinf(cnr) else peak_std / cnr

    if scene.noise_sigma == 0:
        observed = np.abs(signal)
    else:
        n1 = rng.normal(0.0, scene.noise_sigma, size=signal.shape)
        n2 = rng.normal(0.0, scene.noise_sigma, size=signal.shape)
        observed = np.sqrt((signal + n1) ** 2 + n2 ** 2)

    return scene, DataMatrix(observed, Role.MIXTURES)


def measured_cnr(scene: FmriScene, observed: DataMatrix) -> float:
    """
    CNR, измеренный по данным: std пикового пикселя бесшумного сигнала,
    делённое на std остатка (observed - signal) по всем пикселям.
    """
    signal = scene.noise_free_signal()
    residual_std = float(np.std(observed.values - signal))
    if residual_std == 0:
        return math.inf
    return float(np.max(signal.std(axis=1))) / residual_std


def export_scene(
    scene: FmriScene,
    observed: DataMatrix,
    out_dir: str,
    seed: Optional[int] = None,
) -> str:
    """
    Выгрузить сцену: map_XX.csv (g×g на компоненту), timecourses.csv,
    mixtures.csv (g²×T_f) и manifest.json.

    Returns:
        путь к manifest.json
    """
    os.makedirs(out_dir, exist_ok=True)
    for k in range(scene.n_components):
        write_matrix_csv(os.path.join(out_dir, f"map_{k:02d}.csv"), scene.maps[k])
    write_matrix_csv(os.path.join(out_dir, "timecourses.csv"), scene.timecourses)
    write_matrix_csv(os.path.join(out_dir, "mixtures.csv"), observed.values)

    manifest = {
        "grid": scene.grid,
        "K": scene.n_components,
        "T_f": scene.n_frames,
        "baseline": scene.baseline,
        "cnr": "inf" if math.isinf(scene.cnr) else scene.cnr,
        "noise_sigma": scene.noise_sigma,
        "contrast": scene.contrast,
        "jitter": scene.jitter,
        "amplitudes": [float(a) for a in scene.amplitudes],
        "amplitude_model": "per-subject uniform jitter around 1 (assumed, not measured)",
        "seed": seed,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as f:
        f.write(ujson.dumps(manifest, indent=2))
    return path
