"""
Infomax с натуральным градиентом (Infomax-NG), базовая линия.

    W ← W + η·(I - (1/T)·φ(Y)Yᵀ)·W,   φ(y) = 2/(1 + e^{-y}) - 1 = tanh(y/2)

φ - score логистической плотности (минус производная её логарифма).
Шаг η₀ = 0.1/N, делится пополам при росте стоимости, не ниже 1e-5.
"""

from typing import List, Optional, Tuple

import numpy as np

from sparseica.engines.base_engine import BaseEngine
from sparseica.engines.params import CostValue, EngineParams
from sparseica.errors import DegenerateDemixingError
from sparseica.model import DataMatrix, DemixingState


class InfomaxNgEngine(BaseEngine):

    name = "infomax_ng"
    ETA_FLOOR = 1e-5
    DIVERGENCE_LIMIT = 1e6

    def total_cost(self, W: np.ndarray, Z: np.ndarray) -> CostValue:
        """Отрицательное лог-правдоподобие с логистической плотностью"""
        Y = W @ Z
        abs_y = np.abs(Y)
        log_density = -abs_y - 2 * np.log1p(np.exp(-abs_y))
        entropy = float(-np.sum(np.mean(log_density, axis=1)))
        sign, log_det = np.linalg.slogdet(W)
        if sign == 0:
            log_det = -np.inf
        return CostValue(entropy_sum=entropy, log_det_term=float(log_det))

    def optimize(self, state: DemixingState, Z: np.ndarray) -> Tuple[DemixingState, List[CostValue]]:
        n, T = Z.shape
        identity = np.eye(n)
        eta = self.params.infomax_eta0 or 0.1 / n

        W = state.W.copy()
        cost = self.total_cost(W, Z)
        trace = [cost]

        for step in range(1, self.params.max_sweeps + 1):
            state.iteration = step
            Y = W @ Z
            score = np.tanh(Y / 2)
            update = eta * (identity - score @ Y.T / T) @ W
            norm = float(np.linalg.norm(update))

            if not np.isfinite(norm) or norm > self.DIVERGENCE_LIMIT:
                state.diverged = True
                break

            trial = W + update
            trial_cost = self.total_cost(trial, Z)
            if not np.isfinite(trial_cost.total):
                state.diverged = True
                break

            if trial_cost.total > cost.total and eta > self.ETA_FLOOR:
                eta = max(eta / 2, self.ETA_FLOOR)
                continue

            W, cost = trial, trial_cost
            trace.append(cost)

            if self.verbose and step % 10 == 0:
                print(f"    step {step}: cost={cost.total:.6f}, eta={eta:.2e}, update={norm:.2e}")
            if norm < self.params.tol:
                state.converged = True
                break

        # нормировка строк только для отчёта
        state.W = W / np.linalg.norm(W, axis=1, keepdims=True)
        try:
            state.refresh_decoupling()
        except DegenerateDemixingError:
            state.decoupling = np.full_like(state.W, np.nan)
            state.diverged = True
        return state, trace


def run_infomax_ng(
    Z: DataMatrix,
    params: EngineParams,
    initial_W: Optional[np.ndarray] = None,
    verbose: bool = False,
) -> Tuple[DemixingState, List[CostValue]]:
    return InfomaxNgEngine(params, verbose).run(Z, initial_W)
