"""
Настройки окружения: читаем .env один раз при импорте.

Переменные:
    SPARSEICA_WORKERS      - число воркеров для sweep (по умолчанию 1)
    SPARSEICA_OUTPUT_DIR   - куда писать результаты (по умолчанию ./results)
    SPARSEICA_TABLE_CACHE  - CSV кэш таблиц энтропийных границ (опционально)
"""

import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


def get_workers() -> int:
    """Число воркеров по умолчанию (SPARSEICA_WORKERS)"""
    raw = os.getenv("SPARSEICA_WORKERS", "1")
    try:
        workers = int(raw)
    except ValueError:
        raise ValueError(f"SPARSEICA_WORKERS must be an integer, got {raw!r}")
    return max(workers, 1)


def get_output_dir() -> str:
    return os.getenv("SPARSEICA_OUTPUT_DIR", "./results")


def get_table_cache_path() -> Optional[str]:
    """Путь к кэшу таблиц или None, если кэш не настроен"""
    path = os.getenv("SPARSEICA_TABLE_CACHE")
    return path or None


if __name__ == "__main__":
    print(f"Workers: {get_workers()}")
    print(f"Output dir: {get_output_dir()}")
    print(f"Table cache: {get_table_cache_path()}")
