"""
SparseICA-EBM: ICA минимизацией энтропийных границ со сглаженным ℓ1-штрафом,
базовые алгоритмы, генераторы данных, метрики и стенд для развёрток.
"""

__version__ = "0.1.0"
