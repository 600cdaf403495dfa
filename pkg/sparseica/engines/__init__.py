"""
ICA алгоритмы.

Доступные движки:
1. SparseEbmEngine - SparseICA-EBM (энтропийные границы + сглаженный ℓ1)
2. IcaEbmEngine - ICA-EBM (то же без штрафа)
3. InfomaxNgEngine - Infomax с натуральным градиентом
"""

from typing import Optional

from .base_engine import BaseEngine
from .ebm_engine import (
    IcaEbmEngine,
    SparseEbmEngine,
    decoupled_row_update,
    run_ica_ebm,
    run_sparse_ica_ebm,
    sparse_cost,
    sparse_cost_gradient,
)
from .infomax_engine import InfomaxNgEngine, run_infomax_ng
from .params import CostValue, EngineParams, LineSearch, SparsityPenalty
from .sparsity import smoothed_l1, smoothed_l1_gradient

ENGINES = {
    "sparse_ebm": SparseEbmEngine,
    "ebm": IcaEbmEngine,
    "infomax_ng": InfomaxNgEngine,
}


def create_engine(
    algorithm: str,
    params: EngineParams,
    penalty: Optional[SparsityPenalty] = None,
    verbose: bool = False,
) -> BaseEngine:
    """Создание движка по имени (penalty нужен только для sparse_ebm)"""
    if algorithm not in ENGINES:
        raise ValueError(f"Unknown algorithm: {algorithm}. Available: {list(ENGINES.keys())}")

    if algorithm == "sparse_ebm":
        return SparseEbmEngine(penalty or SparsityPenalty(), params, verbose=verbose)
    if algorithm == "ebm":
        epsilon = penalty.epsilon if penalty is not None else 1e-2
        return IcaEbmEngine(params, verbose=verbose, epsilon=epsilon)
    return InfomaxNgEngine(params, verbose=verbose)


__all__ = [
    'ENGINES',
    'BaseEngine',
    'SparseEbmEngine',
    'IcaEbmEngine',
    'InfomaxNgEngine',
    'CostValue',
    'EngineParams',
    'LineSearch',
    'SparsityPenalty',
    'create_engine',
    'decoupled_row_update',
    'run_ica_ebm',
    'run_infomax_ng',
    'run_sparse_ica_ebm',
    'smoothed_l1',
    'smoothed_l1_gradient',
    'sparse_cost',
    'sparse_cost_gradient',
]
