import numpy as np
import pytest

from sparseica.datagen import random_mixing, sample_sources
from sparseica.entropy_bound import default_tables
from sparseica.model import DataMatrix, Role, whiten


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def tables():
    """Таблицы границ строятся один раз на сессию"""
    return default_tables()


def make_problem(N, T, beta, seed):
    """GGD источники, смешивание, отбеливание. Возвращает (S, A, Z, transform)"""
    rng = np.random.default_rng(seed)
    S = sample_sources(beta, N, T, rng)
    A = random_mixing(N, rng)
    Z, transform = whiten(DataMatrix(A @ S, Role.MIXTURES), N)
    return S, A, Z, transform


@pytest.fixture
def problem():
    return make_problem
