"""
SparseICA-EBM: развязанная построчная оптимизация

    J(w_m) = Ĥ(y_m) - log|h_mᵀw_m| + λ_m·Σ_t √(y_t² + ε)

ICA-EBM - тот же алгоритм с λ = 0.

Как работает один проход:
1. Для каждой строки m пересчитываем h_m по текущим остальным строкам
2. Градиент ∇J проецируем на касательную к сфере ‖w_m‖ = 1
3. Бэктрекинг Армихо вдоль нормированного направления, после каждой
   пробы нормируем w_m; функция энтропийной границы заморожена
   на время линейного поиска
4. Стоп по max_m(1 - |w_newᵀ w_old|) < tol или по max_sweeps
"""

from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from sparseica.engines.base_engine import BaseEngine
from sparseica.engines.params import CostValue, EngineParams, SparsityPenalty
from sparseica.engines.sparsity import smoothed_l1, smoothed_l1_gradient
from sparseica.entropy_bound import (
    EntropyBoundTable,
    EntropyEstimate,
    default_tables,
    entropy_gradient,
    estimate_entropy,
)
from sparseica.errors import (
    DegenerateDirectionError,
    EntropyEstimationError,
    StandardizationError,
)
from sparseica.model import DataMatrix, DemixingState

Tables = Dict[str, EntropyBoundTable]

DEGENERATE_PROJECTION = 1e-12
STATIONARY_GRADIENT = 1e-12


def _values(Z: Union[DataMatrix, np.ndarray]) -> np.ndarray:
    return Z.values if isinstance(Z, DataMatrix) else np.asarray(Z, dtype=float)


def _row_cost(
    w: np.ndarray,
    Z: np.ndarray,
    h: np.ndarray,
    lam: float,
    epsilon: float,
    tables: Tables,
    frozen: Optional[str] = None,
) -> CostValue:
    projection = abs(h @ w)
    if projection <= DEGENERATE_PROJECTION:
        raise DegenerateDirectionError(
            f"|h_mᵀw_m| = {projection:.3e}: w_m collapsed into the span of the other rows"
        )
    y = w @ Z
    est = estimate_entropy(y, tables, only=frozen)
    sparsity = lam * smoothed_l1(y, epsilon) if lam > 0 else 0.0
    return CostValue(entropy_sum=est.value, log_det_term=float(np.log(projection)), sparsity_term=sparsity)


def sparse_cost(
    w_m: np.ndarray,
    Z: Union[DataMatrix, np.ndarray],
    state: DemixingState,
    m: int,
    penalty: SparsityPenalty,
    tables: Optional[Tables] = None,
    frozen: Optional[str] = None,
) -> CostValue:
    """
    Развязанная стоимость строки m. Энтропии остальных строк - константы
    и сюда не входят.

    Args:
        frozen: id измерительной функции, если выбор границы заморожен
    """
    tables = tables if tables is not None else default_tables()
    return _row_cost(
        np.asarray(w_m, dtype=float), _values(Z), state.decoupling[m],
        penalty.lambda_for(m), penalty.epsilon, tables, frozen,
    )


def sparse_cost_gradient(
    w_m: np.ndarray,
    Z: Union[DataMatrix, np.ndarray],
    state: DemixingState,
    m: int,
    penalty: SparsityPenalty,
    tables: Optional[Tables] = None,
    est: Optional[EntropyEstimate] = None,
) -> np.ndarray:
    """∇J(w_m) = ∇Ĥ - h_m/(h_mᵀw_m) + λ_m·∇f при замороженной функции границы"""
    tables = tables if tables is not None else default_tables()
    Z = _values(Z)
    w = np.asarray(w_m, dtype=float)
    h = state.decoupling[m]
    y = w @ Z
    if est is None:
        est = estimate_entropy(y, tables)

    grad = entropy_gradient(y, Z, w, est) - h / (h @ w)
    lam = penalty.lambda_for(m)
    if lam > 0:
        grad = grad + lam * smoothed_l1_gradient(y, Z, penalty.epsilon)
    return grad


def decoupled_row_update(
    m: int,
    state: DemixingState,
    Z: Union[DataMatrix, np.ndarray],
    penalty: SparsityPenalty,
    params: EngineParams,
    tables: Optional[Tables] = None,
) -> Tuple[np.ndarray, bool]:
    """
    Один шаг по строке m. Состояние не изменяется.

    Returns:
        (новая w_m, шаг принят). При отказе возвращается копия старой w_m.
    """
    tables = tables if tables is not None else default_tables()
    Z = _values(Z)
    ls = params.line_search
    w = state.W[m]
    h = state.decoupling[m]
    lam = penalty.lambda_for(m)

    est = estimate_entropy(w @ Z, tables)
    frozen = est.selected_function
    current = _row_cost(w, Z, h, lam, penalty.epsilon, tables, frozen)

    grad = sparse_cost_gradient(w, Z, state, m, penalty, tables, est)
    tangent = grad - (grad @ w) * w
    slope = float(np.linalg.norm(tangent))
    if not np.isfinite(slope) or slope < STATIONARY_GRADIENT:
        return w.copy(), False

    direction = -tangent / slope
    step = ls.initial_step
    for _ in range(ls.max_halvings + 1):
        trial = w + step * direction
        trial = trial / np.linalg.norm(trial)
        try:
            cost = _row_cost(trial, Z, h, lam, penalty.epsilon, tables, frozen)
        except (DegenerateDirectionError, EntropyEstimationError, StandardizationError):
            cost = None

        if cost is not None and cost.total <= current.total - ls.armijo_c * step * slope:
            return trial, True
        step *= ls.shrink

    return w.copy(), False


class SparseEbmEngine(BaseEngine):
    """
    SparseICA-EBM. Работает в отбеленной области, строки W единичной нормы.
    """

    name = "sparse_ebm"

    def __init__(
        self,
        penalty: SparsityPenalty,
        params: EngineParams,
        tables: Optional[Tables] = None,
        verbose: bool = False,
    ):
        super().__init__(params, verbose)
        self.penalty = penalty
        self.tables = tables if tables is not None else default_tables()

    def total_cost(self, W: np.ndarray, Z: np.ndarray) -> CostValue:
        """Σ_m Ĥ(y_m) - log|det W| + Σ_m λ_m f(y_m)"""
        Y = W @ Z
        entropy = 0.0
        sparsity = 0.0
        for m in range(W.shape[0]):
            entropy += estimate_entropy(Y[m], self.tables).value
            lam = self.penalty.lambda_for(m)
            if lam > 0:
                sparsity += lam * smoothed_l1(Y[m], self.penalty.epsilon)
        _, log_det = np.linalg.slogdet(W)
        return CostValue(entropy_sum=entropy, log_det_term=float(log_det), sparsity_term=sparsity)

    def optimize(self, state: DemixingState, Z: np.ndarray) -> Tuple[DemixingState, List[CostValue]]:
        n = state.n_sources
        trace = [self.total_cost(state.W, Z)]

        for sweep in range(1, self.params.max_sweeps + 1):
            W_old = state.W.copy()

            for m in range(n):
                # остальные строки могли измениться на этом проходе
                state.refresh_decoupling(m)
                w_new, accepted = decoupled_row_update(m, state, Z, self.penalty, self.params, self.tables)
                if accepted:
                    state.W[m] = w_new

            state.iteration = sweep
            trace.append(self.total_cost(state.W, Z))

            change = float(np.max(1 - np.abs(np.sum(state.W * W_old, axis=1))))
            if self.verbose and sweep % 10 == 0:
                print(f"    sweep {sweep}: cost={trace[-1].total:.6f}, change={change:.2e}")
            if change < self.params.tol:
                state.converged = True
                break

        state.refresh_decoupling()
        return state, trace


class IcaEbmEngine(SparseEbmEngine):
    """ICA-EBM: SparseICA-EBM без штрафа"""

    name = "ebm"

    def __init__(
        self,
        params: EngineParams,
        tables: Optional[Tables] = None,
        verbose: bool = False,
        epsilon: float = 1e-2,
    ):
        super().__init__(SparsityPenalty(0.0, epsilon), params, tables, verbose)


def run_sparse_ica_ebm(
    Z: DataMatrix,
    penalty: SparsityPenalty,
    params: EngineParams,
    tables: Optional[Tables] = None,
    initial_W: Optional[np.ndarray] = None,
    verbose: bool = False,
) -> Tuple[DemixingState, List[CostValue]]:
    return SparseEbmEngine(penalty, params, tables, verbose).run(Z, initial_W)


def run_ica_ebm(
    Z: DataMatrix,
    params: EngineParams,
    tables: Optional[Tables] = None,
    initial_W: Optional[np.ndarray] = None,
    verbose: bool = False,
) -> Tuple[DemixingState, List[CostValue]]:
    return IcaEbmEngine(params, tables, verbose).run(Z, initial_W)
