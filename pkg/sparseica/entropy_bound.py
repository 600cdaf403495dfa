"""
Оценка дифференциальной энтропии минимизацией энтропийных границ (EBM).

Как работает:
1. Для каждой измерительной функции G строим таблицу H_max(μ):
   максимум энтропии при E{x}=0, E{x²}=1, E{G(x)}=μ.
   Решение имеет вид p*(x) = exp(a + b·x + c·x² + d·G(x)),
   ищем (b, c, d) демпфированным Ньютоном на двойственной задаче.
2. Для выборки y считаем μ_k = mean(G_k(y)) по всем четырём функциям,
   интерполируем границы и берём минимальную (самую тесную).
3. Градиент по w идёт через производную границы dH/dμ = -d.

Функции по умолчанию:
- even_fourth:  G(x) = x⁴
- bounded_even: G(x) = |x| / (1 + |x|)
- bounded_odd:  G(x) = x·|x| / (1 + |x|)
- gauss_odd:    G(x) = x·exp(-x²/2)
"""

import csv
import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import logsumexp
from tqdm import tqdm

from sparseica import settings
from sparseica.errors import (
    DimensionError,
    EntropyEstimationError,
    ParameterError,
    StandardizationError,
    TableCacheError,
    TableConstructionError,
)

GAUSSIAN_ENTROPY = 0.5 * math.log(2 * math.pi * math.e)

DEFAULT_GRID_SIZE = 257
QUADRATURE_HALF_WIDTH = 12.0
QUADRATURE_ORDER = 24
# панели по u для хвостов x = ±12/u
TAIL_PANELS = (0.0, 0.005, 0.01, 0.02, 0.04, 0.07, 0.1, 0.15, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0)
FAR_EDGE = QUADRATURE_HALF_WIDTH / TAIL_PANELS[1]
NEWTON_MAX_ITER = 200
MOMENT_TOLERANCE = 1e-8
TAIL_MASS_LIMIT = 1e-12


# ============================================================================
# ИЗМЕРИТЕЛЬНЫЕ ФУНКЦИИ
# ============================================================================

def _fourth(x):
    x2 = x * x
    return x2 * x2


def _fourth_prime(x):
    return 4 * x * x * x


def _bounded_even(x):
    a = np.abs(x)
    return a / (1 + a)


def _bounded_even_prime(x):
    return np.sign(x) / (1 + np.abs(x)) ** 2


def _bounded_odd(x):
    a = np.abs(x)
    return x * a / (1 + a)


def _bounded_odd_prime(x):
    a = np.abs(x)
    return a * (2 + a) / (1 + a) ** 2


def _gauss_odd(x):
    return x * np.exp(-x ** 2 / 2)


def _gauss_odd_prime(x):
    return (1 - x ** 2) * np.exp(-x ** 2 / 2)


@dataclass(frozen=True)
class MeasuringFunction:
    """
    Измерительная функция G и её производная.

    mu_span - интервал μ, на котором пытаемся строить таблицу;
    реально допустимая часть определяется сходимостью Ньютона.
    """

    function_id: str
    g: Callable[[np.ndarray], np.ndarray]
    g_prime: Callable[[np.ndarray], np.ndarray]
    parity: str
    mu_span: Tuple[float, float]


MEASURING_FUNCTIONS: Dict[str, MeasuringFunction] = {
    "even_fourth": MeasuringFunction("even_fourth", _fourth, _fourth_prime, "even", (1.15, 3.0)),
    "bounded_even": MeasuringFunction("bounded_even", _bounded_even, _bounded_even_prime, "even", (0.01, 0.495)),
    "bounded_odd": MeasuringFunction("bounded_odd", _bounded_odd, _bounded_odd_prime, "odd", (-0.9, 0.9)),
    "gauss_odd": MeasuringFunction("gauss_odd", _gauss_odd, _gauss_odd_prime, "odd", (-0.6, 0.6)),
}


# ============================================================================
# КВАДРАТУРА
# ============================================================================

def _gauss_legendre(edges) -> Tuple[np.ndarray, np.ndarray]:
    """Составная квадратура Гаусса-Лежандра по панелям edges"""
    nodes_ref, weights_ref = np.polynomial.legendre.leggauss(QUADRATURE_ORDER)
    nodes, weights = [], []
    for left_edge, right_edge in zip(edges[:-1], edges[1:]):
        half = (right_edge - left_edge) / 2
        nodes.append(left_edge + half * (nodes_ref + 1))
        weights.append(half * weights_ref)
    return np.concatenate(nodes), np.concatenate(weights)


@lru_cache(maxsize=1)
def _quadrature() -> Tuple[np.ndarray, np.ndarray]:
    """
    Узлы и веса на всей прямой, отсортированные по x.

    [-12, 12]: составная квадратура Гаусса-Лежандра, узкие панели около
    нуля (изломы |x| и пики разреженных плотностей).
    |x| > 12: хвостовая поправка заменой x = ±12/u, dx = 12/u² du,
    u ∈ (0, 1] с той же квадратурой. Хвост тяжёлой плотности
    интегрируется, а не отрезается.
    """
    fine = [0.0, 0.001, 0.003, 0.007, 0.015, 0.03, 0.06, 0.12, 0.25]
    coarse = list(np.arange(0.5, QUADRATURE_HALF_WIDTH + 1e-9, 0.5))
    right = np.array(fine + coarse)
    core_x, core_w = _gauss_legendre(np.concatenate([-right[:0:-1], right]))

    u, u_w = _gauss_legendre(np.array(TAIL_PANELS))
    tail_x = QUADRATURE_HALF_WIDTH / u
    tail_w = u_w * QUADRATURE_HALF_WIDTH / u ** 2

    x = np.concatenate([-tail_x, core_x, tail_x])
    w = np.concatenate([tail_w, core_w, tail_w])
    order = np.argsort(x)
    return x[order], w[order]


def gaussian_moment(f: MeasuringFunction) -> float:
    """E{G(x)} для x ~ N(0, 1)"""
    x, w = _quadrature()
    density = np.exp(-x ** 2 / 2) / math.sqrt(2 * math.pi)
    value = float(np.sum(w * density * f.g(x)))
    if f.parity == "odd":
        return 0.0
    return value


# ============================================================================
# МАКСИМУМ ЭНТРОПИИ ПРИ МОМЕНТНЫХ ОГРАНИЧЕНИЯХ
# ============================================================================

def _solve_max_entropy(
    features: np.ndarray,
    log_weights: np.ndarray,
    target: np.ndarray,
    theta0: np.ndarray,
) -> Optional[Tuple[np.ndarray, float]]:
    """
    Ньютон на выпуклой двойственной функции D(θ) = log Z(θ) - θ·m.

    Returns:
        (θ*, H) или None, если невязка моментов не ушла ниже
        MOMENT_TOLERANCE или масса уходит за FAR_EDGE.
    """
    far = np.abs(features[0]) > FAR_EDGE

    def dual(theta):
        exponent = theta @ features + log_weights
        log_z = logsumexp(exponent)
        return log_z - theta @ target, exponent, log_z

    theta = theta0.copy()
    for _ in range(NEWTON_MAX_ITER):
        value, exponent, log_z = dual(theta)
        p = np.exp(exponent - log_z)
        mean = features @ p
        grad = mean - target

        if np.max(np.abs(grad)) < 1e-11:
            break

        centered = features - mean[:, None]
        hessian = (centered * p) @ centered.T
        try:
            step = np.linalg.solve(hessian, -grad)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None

        slope = grad @ step
        # у сходимости приращение D тонет в округлении
        slack = 1e-13 * max(1.0, abs(value))
        t = 1.0
        while t > 1e-10:
            trial_value, _, _ = dual(theta + t * step)
            if np.isfinite(trial_value) and trial_value <= value + 1e-4 * t * slope + slack:
                break
            t /= 2
        else:
            # спуск остановился; годность решает невязка ниже
            break
        theta = theta + t * step

    value, exponent, log_z = dual(theta)
    p = np.exp(exponent - log_z)
    residual = np.max(np.abs(features @ p - target))
    if not np.isfinite(value) or residual >= MOMENT_TOLERANCE:
        return None
    # масса за FAR_EDGE: плотность не нормируема на прямой
    if np.sum(p[far]) > TAIL_MASS_LIMIT:
        return None
    return theta, float(value)


@dataclass(frozen=True)
class EntropyBoundTable:
    """
    Табличная граница H_max(μ) для одной измерительной функции.
    """

    function_id: str
    mu_grid: np.ndarray
    h_max: np.ndarray
    dh_dmu: np.ndarray
    gaussian_mu: float
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)
    _slope: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        spline = CubicHermiteSpline(self.mu_grid, self.h_max, self.dh_dmu)
        object.__setattr__(self, "_spline", spline)
        object.__setattr__(self, "_slope", spline.derivative())

    @property
    def feasible_range(self) -> Tuple[float, float]:
        return float(self.mu_grid[0]), float(self.mu_grid[-1])

    def contains(self, mu: float) -> bool:
        lo, hi = self.feasible_range
        return lo <= mu <= hi

    def evaluate(self, mu: float) -> Tuple[float, float]:
        """(H_max(μ), dH_max/dμ)"""
        return float(self._spline(mu)), float(self._slope(mu))


def _mu_grid(f: MeasuringFunction, mu_gauss: float, grid_size: int) -> Tuple[np.ndarray, int]:
    """Сетка μ, содержащая гауссову точку. Возвращает (сетка, индекс гауссовой точки)"""
    lo, hi = f.mu_span
    if f.parity == "odd":
        half = grid_size // 2
        right = np.linspace(0.0, hi, half + 1)
        grid = np.concatenate([-right[:0:-1], right])
        return grid, half

    if hi <= mu_gauss:
        return np.linspace(lo, mu_gauss, grid_size), grid_size - 1

    n_left = int(round((mu_gauss - lo) / (hi - lo) * (grid_size - 1)))
    n_left = min(max(n_left, 1), grid_size - 2)
    left = np.linspace(lo, mu_gauss, n_left + 1)
    right = np.linspace(mu_gauss, hi, grid_size - n_left)
    return np.concatenate([left, right[1:]]), n_left


def build_bound_table(f: MeasuringFunction, grid_size: int = DEFAULT_GRID_SIZE) -> EntropyBoundTable:
    """
    Построить таблицу границы для функции f.

    Решаем задачу максимума энтропии в каждой точке сетки, двигаясь
    от гауссовой точки наружу с тёплым стартом. Если тёплый старт не
    сошёлся, повторяем из гауссовой точки; точку, не решённую и так,
    пропускаем. Таблица - все решённые точки.
    """
    if grid_size < 64:
        raise ParameterError(f"grid_size must be >= 64, got {grid_size}")

    x, w = _quadrature()
    features = np.vstack([x, x ** 2, f.g(x)])
    log_weights = np.log(w)

    mu_gauss = gaussian_moment(f)
    grid, center_idx = _mu_grid(f, mu_gauss, grid_size)
    grid[center_idx] = mu_gauss

    h = np.full(grid.size, np.nan)
    dh = np.full(grid.size, np.nan)
    gauss_theta = np.array([0.0, -0.5, 0.0])

    directions = [range(center_idx, grid.size)]
    if f.parity == "even":
        directions.append(range(center_idx, -1, -1))

    for indices in directions:
        theta = gauss_theta
        for idx in indices:
            target = np.array([0.0, 1.0, grid[idx]])
            solved = _solve_max_entropy(features, log_weights, target, theta)
            if solved is None:
                solved = _solve_max_entropy(features, log_weights, target, gauss_theta)
            if solved is None:
                continue
            theta, value = solved
            h[idx] = value
            dh[idx] = -theta[2]

    if f.parity == "odd":
        # зеркалим правую половину: H чётна по μ, dH/dμ нечётна
        h[:center_idx] = h[:center_idx:-1]
        dh[:center_idx] = -dh[:center_idx:-1]

    solved_mask = np.isfinite(h)
    n_feasible = int(np.count_nonzero(solved_mask))
    if not solved_mask[center_idx] or n_feasible < 8:
        raise TableConstructionError(
            f"Table for {f.function_id}: only {n_feasible} feasible grid points (need >= 8)"
        )

    keep = np.flatnonzero(solved_mask)
    return EntropyBoundTable(
        function_id=f.function_id,
        mu_grid=grid[keep].copy(),
        h_max=h[keep].copy(),
        dh_dmu=dh[keep].copy(),
        gaussian_mu=mu_gauss,
    )


# ============================================================================
# КЭШ ТАБЛИЦ
# ============================================================================

def save_tables(tables: Dict[str, EntropyBoundTable], path: str):
    """CSV: function_id, mu, h_max, dh_dmu"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["function_id", "mu", "h_max", "dh_dmu"])
        for function_id, table in tables.items():
            for mu, h, dh in zip(table.mu_grid, table.h_max, table.dh_dmu):
                writer.writerow([function_id, repr(float(mu)), repr(float(h)), repr(float(dh))])


def load_tables(path: str) -> Dict[str, EntropyBoundTable]:
    """
    Загрузить кэш и проверить инвариант гауссовой точки:
    H_max(E_N{G}) = ½ln(2πe) с точностью 1e-4.
    """
    columns: Dict[str, List[Tuple[float, float, float]]] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ["function_id", "mu", "h_max", "dh_dmu"]:
            raise TableCacheError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            try:
                entry = (float(row["mu"]), float(row["h_max"]), float(row["dh_dmu"]))
            except (TypeError, ValueError) as e:
                raise TableCacheError(f"{path}: bad row {row}: {e}")
            columns.setdefault(row["function_id"], []).append(entry)

    tables = {}
    for function_id, entries in columns.items():
        if function_id not in MEASURING_FUNCTIONS:
            raise TableCacheError(f"{path}: unknown measuring function {function_id!r}")
        data = np.array(entries)
        if data.shape[0] < 8 or np.any(np.diff(data[:, 0]) <= 0):
            raise TableCacheError(f"{path}: grid for {function_id} is too short or not increasing")
        mu_gauss = gaussian_moment(MEASURING_FUNCTIONS[function_id])
        table = EntropyBoundTable(function_id, data[:, 0], data[:, 1], data[:, 2], mu_gauss)
        if not table.contains(mu_gauss):
            raise TableCacheError(f"{path}: {function_id} table misses the Gaussian point")
        value, _ = table.evaluate(mu_gauss)
        if abs(value - GAUSSIAN_ENTROPY) > 1e-4:
            raise TableCacheError(
                f"{path}: {function_id} gives {value:.6f} at the Gaussian point, expected {GAUSSIAN_ENTROPY:.6f}"
            )
        tables[function_id] = table

    if set(tables) != set(MEASURING_FUNCTIONS):
        raise TableCacheError(f"{path}: cache covers {sorted(tables)}, expected {sorted(MEASURING_FUNCTIONS)}")
    return tables


def build_tables(grid_size: int = DEFAULT_GRID_SIZE) -> Dict[str, EntropyBoundTable]:
    items = tqdm(MEASURING_FUNCTIONS.items(), desc="Entropy bound tables", leave=False)
    return {fid: build_bound_table(f, grid_size) for fid, f in items}


@lru_cache(maxsize=1)
def default_tables() -> Dict[str, EntropyBoundTable]:
    """
    Таблицы по умолчанию: из кэша SPARSEICA_TABLE_CACHE, если он валиден,
    иначе строим и (если путь задан) сохраняем.
    """
    cache_path = settings.get_table_cache_path()
    if cache_path and os.path.exists(cache_path):
        try:
            return load_tables(cache_path)
        except (TableCacheError, OSError) as e:
            print(f"⚠️  Entropy table cache rejected ({e}), rebuilding")

    tables = build_tables()
    if cache_path:
        save_tables(tables, cache_path)
        print(f"📤 Entropy tables cached to {cache_path}")
    return tables


# ============================================================================
# ОЦЕНКА ЭНТРОПИИ И ГРАДИЕНТ
# ============================================================================

@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    selected_function: str
    mu: float
    dvalue_dmu: float


def standardize(y: np.ndarray) -> np.ndarray:
    """Привести выборку к нулевому среднему и единичной дисперсии (1/T)"""
    y = np.asarray(y, dtype=float)
    std = y.std()
    if std == 0:
        raise StandardizationError("Cannot standardize a constant vector")
    return (y - y.mean()) / std


def estimate_entropy(
    y: np.ndarray,
    tables: Optional[Dict[str, EntropyBoundTable]] = None,
    only: Optional[str] = None,
) -> EntropyEstimate:
    """
    Верхняя граница энтропии стандартизованной выборки.

    Args:
        y: выборка с |mean| < 1e-6 и |var - 1| < 1e-2
        tables: таблицы (по умолчанию default_tables())
        only: заморозить выбор функции (используется в линейном поиске)
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DimensionError(f"estimate_entropy expects a non-empty vector, got shape {y.shape}")
    mean = y.mean()
    variance = np.mean((y - mean) ** 2)
    if abs(mean) >= 1e-6 or abs(variance - 1) >= 1e-2:
        raise StandardizationError(
            f"Sample not standardized: mean={mean:.3e}, variance={variance:.4f}"
        )

    tables = tables if tables is not None else default_tables()
    candidates = [only] if only is not None else list(tables)

    best: Optional[EntropyEstimate] = None
    for function_id in candidates:
        table = tables[function_id]
        mu = float(np.mean(MEASURING_FUNCTIONS[function_id].g(y)))
        if not table.contains(mu):
            continue
        value, slope = table.evaluate(mu)
        if best is None or value < best.value:
            best = EntropyEstimate(value, function_id, mu, slope)

    if best is None:
        raise EntropyEstimationError(
            f"All measuring functions {candidates} are outside their feasible ranges"
        )
    return best


def entropy_gradient(
    y: np.ndarray,
    Z: np.ndarray,
    w: np.ndarray,
    est: EntropyEstimate,
) -> np.ndarray:
    """
    ∇_w Ĥ(y) при замороженной функции est.selected_function.

    Второе слагаемое убирает радиальную составляющую (направление
    единичной дисперсии), поэтому результат касателен к сфере.
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if Z.ndim != 2 or Z.shape[1] != y.size or Z.shape[0] != w.size:
        raise DimensionError(f"Shapes do not match: y{y.shape}, Z{Z.shape}, w{w.shape}")

    T = y.size
    g_prime = MEASURING_FUNCTIONS[est.selected_function].g_prime(y)
    raw = Z @ g_prime / T
    radial = (g_prime @ y) / T
    return est.dvalue_dmu * (raw - radial * w)
