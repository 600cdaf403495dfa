"""
Иерархия исключений.

Каждый класс наследует и SparseIcaError, и подходящий встроенный тип:
ValueError для плохих входных данных, RuntimeError для численных сбоев.
"""

from typing import List, Optional


class SparseIcaError(Exception):
    """Базовый класс всех ошибок пакета"""


class DimensionError(SparseIcaError, ValueError):
    """Пустая матрица, несогласованные размеры, рваные строки CSV"""


class RankError(SparseIcaError, ValueError):
    """Недостаточный ранг при отбеливании"""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class DegenerateDemixingError(SparseIcaError, RuntimeError):
    """Строки W (кроме m-й) линейно зависимы: h_m не определён"""


class DegenerateDirectionError(SparseIcaError, RuntimeError):
    """w_m схлопнулся в span остальных строк"""


class ParameterError(SparseIcaError, ValueError):
    """Недопустимые параметры генератора или алгоритма"""


class StandardizationError(SparseIcaError, ValueError):
    """Выборка не стандартизована (среднее 0, дисперсия 1)"""


class EntropyEstimationError(SparseIcaError, RuntimeError):
    """Все измерительные функции вне допустимых диапазонов"""


class TableConstructionError(SparseIcaError, RuntimeError):
    """Слишком мало допустимых точек в таблице границы"""


class TableCacheError(SparseIcaError, ValueError):
    """Кэш таблиц не прошёл проверку"""


class SceneError(SparseIcaError, RuntimeError):
    """Не удалось разместить пятна сцены"""


class MetricError(SparseIcaError, ValueError):
    """Метрика не определена для входа"""

    def __init__(self, message: str, row: Optional[int] = None):
        super().__init__(message)
        self.row = row


class DegenerateSeparationError(SparseIcaError, RuntimeError):
    """Нулевой диагональный элемент глобальной матрицы после перестановки"""


class ConfigError(SparseIcaError, ValueError):
    """Ошибки конфигурации: хранит полный список, а не только первую"""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class PlotError(SparseIcaError, ValueError):
    """Нечего рисовать"""


class GenerationError(SparseIcaError, RuntimeError):
    """Генератор не уложился в лимит отбраковок"""
