"""
Монте-Карло развёртки.

Как работает:
1. Для каждой тройки (алгоритм, значение, прогон) выводим дочерние сиды
   из master_seed стабильным 64-битным хешем
2. Прогоны независимы: выполняем последовательно или в пуле процессов
   (asyncio + ProcessPoolExecutor, прогресс через tqdm_asyncio.gather)
3. Записи сортируются по ключу, поэтому результат не зависит от
   порядка выполнения и числа воркеров
4. Сбой прогона не прерывает развёртку: metric_value = NaN, converged = false
"""

import asyncio
import csv
import hashlib
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
import ujson
from tqdm import tqdm
from tqdm.asyncio import tqdm_asyncio

from sparseica import settings
from sparseica.config import SweepConfig
from sparseica.experiments import create_experiment

RUNS_HEADER = [
    "experiment", "algorithm", "sweep_value", "run_index", "seed",
    "metric_name", "metric_value", "wall_time_s", "converged",
]
SUMMARY_HEADER = [
    "experiment", "algorithm", "sweep_value", "n_runs", "mean", "median", "q25", "q75", "n_excluded",
]
DATA_STREAM = "data"
NO_ALGORITHM = "ggd"


@dataclass(frozen=True)
class RunRecord:
    experiment: str
    algorithm: str
    sweep_value: float
    run_index: int
    seed: int
    metric_name: str
    metric_value: float
    wall_time_s: float
    converged: bool

    @property
    def key(self) -> Tuple[str, str, float, int]:
        return (self.experiment, self.algorithm, self.sweep_value, self.run_index)

    def to_row(self) -> List[str]:
        return [
            self.experiment,
            self.algorithm,
            _format_float(self.sweep_value),
            str(self.run_index),
            str(self.seed),
            self.metric_name,
            _format_float(self.metric_value),
            _format_float(self.wall_time_s),
            "true" if self.converged else "false",
        ]

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        return cls(
            experiment=row["experiment"],
            algorithm=row["algorithm"],
            sweep_value=float(row["sweep_value"]),
            run_index=int(row["run_index"]),
            seed=int(row["seed"]),
            metric_name=row["metric_name"],
            metric_value=float(row["metric_value"]),
            wall_time_s=float(row["wall_time_s"]),
            converged=row["converged"] == "true",
        )


def _format_float(value: float) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


# ============================================================================
# СИДЫ
# ============================================================================

def child_seed(master_seed: int, experiment: str, stream: str, sweep_value: float, run_index: int) -> int:
    """Стабильный 64-битный сид по полям ключа (не зависит от PYTHONHASHSEED)"""
    text = "|".join([str(master_seed), experiment, stream, _format_float(sweep_value), str(run_index)])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def run_seeds(cfg: SweepConfig, algorithm: str, sweep_value: float, run_index: int) -> Tuple[int, int]:
    """
    (сид данных, сид записи).

    Сид данных не зависит от алгоритма: все алгоритмы видят одни и те же
    данные в прогоне с одним индексом.
    """
    data = child_seed(cfg.master_seed, cfg.experiment, DATA_STREAM, sweep_value, run_index)
    record = child_seed(cfg.master_seed, cfg.experiment, algorithm, sweep_value, run_index)
    return data, record


# ============================================================================
# ПРОГОНЫ
# ============================================================================

def run_single(cfg: SweepConfig, algorithm: str, sweep_value: float, run_index: int) -> RunRecord:
    """Один прогон. Никогда не бросает исключений."""
    experiment = create_experiment(cfg)
    data_seed, seed = run_seeds(cfg, algorithm, sweep_value, run_index)

    started = time.perf_counter()
    try:
        outcome = experiment.run(algorithm, sweep_value, data_seed, seed)
        value, converged = outcome.metric_value, outcome.converged
    except Exception:
        value, converged = math.nan, False
    elapsed = time.perf_counter() - started

    if not math.isfinite(value):
        value, converged = math.nan, False

    return RunRecord(
        experiment=cfg.experiment,
        algorithm=algorithm,
        sweep_value=float(sweep_value),
        run_index=run_index,
        seed=seed,
        metric_name=experiment.metric_name,
        metric_value=float(value),
        wall_time_s=elapsed if cfg.record_timing else 0.0,
        converged=converged,
    )


def _run_task(task: Tuple[SweepConfig, str, float, int]) -> RunRecord:
    return run_single(*task)


def plan_tasks(cfg: SweepConfig) -> List[Tuple[SweepConfig, str, float, int]]:
    experiment = create_experiment(cfg)
    algorithms = cfg.algorithms if experiment.uses_algorithms else [NO_ALGORITHM]
    return [
        (cfg, algorithm, float(value), run_index)
        for algorithm in algorithms
        for value in cfg.sweep_values
        for run_index in range(cfg.runs)
    ]


async def _run_pool(tasks: list, workers: int) -> List[RunRecord]:
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [loop.run_in_executor(executor, _run_task, task) for task in tasks]
        return await tqdm_asyncio.gather(*futures, desc="Sweep runs")


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> List[RunRecord]:
    """
    Выполнить все прогоны эксперимента.

    Args:
        cfg: проверенный конфиг
        workers: число процессов (по умолчанию SPARSEICA_WORKERS)

    Returns:
        записи, отсортированные по (алгоритм, значение, прогон)
    """
    workers = workers if workers is not None else settings.get_workers()
    tasks = plan_tasks(cfg)

    print(f"⚙️  {cfg.experiment}: {len(tasks)} runs on {workers} worker(s)")
    if workers <= 1:
        records = [_run_task(task) for task in tqdm(tasks, desc="Sweep runs")]
    else:
        records = asyncio.run(_run_pool(tasks, workers))

    records = sorted(records, key=lambda r: r.key)
    failed = sum(1 for r in records if math.isnan(r.metric_value))
    if failed:
        print(f"⚠️  {failed} run(s) failed and were recorded as NaN")
    print(f"✅ {len(records)} records")
    return records


def replay(cfg: SweepConfig, record_id: str) -> RunRecord:
    """Повторить одну запись по идентификатору 'algorithm:sweep_value:run_index'"""
    parts = record_id.split(":")
    if len(parts) != 3:
        raise ValueError(f"Record id must look like algorithm:sweep_value:run_index, got {record_id!r}")
    algorithm, value, index = parts
    return run_single(cfg, algorithm, float(value), int(index))


# ============================================================================
# СВОДКА
# ============================================================================

@dataclass(frozen=True)
class SummaryRow:
    experiment: str
    algorithm: str
    sweep_value: float
    n_runs: int
    mean: float
    median: float
    q25: float
    q75: float
    n_excluded: int

    @property
    def flagged(self) -> bool:
        """Все прогоны ячейки - NaN"""
        return self.n_runs == 0

    def to_row(self) -> List[str]:
        return [
            self.experiment, self.algorithm, _format_float(self.sweep_value),
            str(self.n_runs), _format_float(self.mean), _format_float(self.median),
            _format_float(self.q25), _format_float(self.q75), str(self.n_excluded),
        ]

    @classmethod
    def from_row(cls, row: dict) -> "SummaryRow":
        return cls(
            experiment=row["experiment"],
            algorithm=row["algorithm"],
            sweep_value=float(row["sweep_value"]),
            n_runs=int(row["n_runs"]),
            mean=float(row["mean"]),
            median=float(row["median"]),
            q25=float(row["q25"]),
            q75=float(row["q75"]),
            n_excluded=int(row["n_excluded"]),
        )


def summarize(records: Iterable[RunRecord]) -> List[SummaryRow]:
    """
    Среднее, медиана и квартили по прогонам для каждой ячейки
    (эксперимент, алгоритм, значение). NaN исключаются и подсчитываются.
    """
    cells = {}
    for record in records:
        cells.setdefault((record.experiment, record.algorithm, record.sweep_value), []).append(record.metric_value)
    if not cells:
        raise ValueError("Cannot summarize an empty record table")

    rows = []
    for (experiment, algorithm, value), metrics in sorted(cells.items()):
        data = np.array(metrics, dtype=float)
        finite = data[~np.isnan(data)]
        excluded = int(data.size - finite.size)
        if finite.size == 0:
            stats = (math.nan,) * 4
        else:
            q25, median, q75 = np.percentile(finite, [25, 50, 75])
            stats = (float(np.mean(finite)), float(median), float(q25), float(q75))
        rows.append(SummaryRow(experiment, algorithm, value, int(finite.size), *stats, excluded))
    return rows


# ============================================================================
# ФАЙЛЫ
# ============================================================================

def _ensure_parent(path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def write_runs_csv(records: Iterable[RunRecord], path: str):
    _ensure_parent(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for record in records:
            writer.writerow(record.to_row())


def read_runs_csv(path: str) -> List[RunRecord]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RUNS_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [RunRecord.from_row(row) for row in reader]


def write_summary_csv(rows: Iterable[SummaryRow], path: str):
    _ensure_parent(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in rows:
            writer.writerow(row.to_row())


def read_summary_csv(path: str) -> List[SummaryRow]:
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != SUMMARY_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [SummaryRow.from_row(row) for row in reader]


def write_manifest(cfg: SweepConfig, path: str, workers: int):
    """Конфиг дословно, разрешённые значения и соглашение о метрике"""
    _ensure_parent(path)
    resolved = {key: (str(value) if isinstance(value, float) and math.isinf(value) else value)
                for key, value in cfg.to_dict().items()}
    resolved["cnr"] = [str(c) if math.isinf(c) else c for c in cfg.cnr]
    resolved["sweep_values"] = [str(v) if math.isinf(v) else v for v in cfg.sweep_values]
    manifest = {
        "config_text": cfg.source_text,
        "resolved": resolved,
        "workers": workers,
        "isr_convention": "sum of off-target row ISR divided by N(N-1), permutation by auction on |G|",
        "data_redraw": "sources and mixing matrix redrawn every run",
        "seed_derivation": "blake2b-64 over master_seed|experiment|stream|sweep_value|run_index",
    }
    with open(path, "w") as f:
        f.write(ujson.dumps(manifest, indent=2))
