"""
Конфигурация эксперимента: плоский текст `key = value`.

    # комментарий
    experiment = isr_vs_beta
    algorithms = sparse_ebm, ebm
    sweep_values = 0.1, 0.2, 0.3
    runs = 20

Все ключи, типы, значения по умолчанию и ограничения - в SCHEMA.
load_config собирает ВСЕ ошибки (с ключом и строкой), а не первую.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional

from sparseica import settings
from sparseica.errors import ConfigError

EXPERIMENT_NAMES = ("gini_vs_beta", "isr_vs_beta", "isr_vs_T", "isr_vs_N", "isr_vs_lambda", "fmri_cnr")
ALGORITHM_NAMES = ("sparse_ebm", "ebm", "infomax_ng")


@dataclass(frozen=True)
class SweepConfig:
    experiment: str
    algorithms: List[str]
    sweep_values: List[float]
    output_dir: str = field(default_factory=settings.get_output_dir)
    N: int = 10
    T: int = 1000
    beta: float = 0.5
    lam: float = 1e4
    epsilon: float = 1e-2
    runs: int = 300
    master_seed: int = 0
    cnr: List[float] = field(default_factory=list)
    grid: int = 64
    K: int = 10
    T_f: int = 260
    baseline: float = 800.0
    jitter: float = 0.05
    max_sweeps: int = 512
    tol: float = 1e-6
    restarts: int = 1
    infomax_eta0: Optional[float] = None
    record_timing: bool = False
    source_text: str = field(default="", compare=False, repr=False)

    def to_dict(self) -> Dict[str, Any]:
        """Значения под именами ключей файла"""
        return {key: getattr(self, spec.attr) for key, spec in SCHEMA.items()}


# ============================================================================
# РАЗБОР ЗНАЧЕНИЙ
# ============================================================================

def _parse_int(text: str) -> int:
    return int(text)


def _parse_float(text: str) -> float:
    value = float(text)
    if math.isnan(value):
        raise ValueError("NaN is not allowed")
    return value


def _parse_optional_float(text: str) -> Optional[float]:
    if text.lower() in ("", "none"):
        return None
    return _parse_float(text)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _parse_str(text: str) -> str:
    if not text:
        raise ValueError("empty value")
    return text


def _list_of(parse: Callable[[str], Any]) -> Callable[[str], list]:
    def parse_list(text: str) -> list:
        return [parse(item.strip()) for item in text.split(",") if item.strip()]
    return parse_list


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else repr(value)
    if isinstance(value, list):
        return ", ".join(_format_value(item) for item in value)
    return str(value)


# ============================================================================
# СХЕМА
# ============================================================================

@dataclass(frozen=True)
class ConfigField:
    attr: str
    parse: Callable[[str], Any]
    check: Optional[Callable[[Any], Optional[str]]] = None


def _at_least(minimum) -> Callable[[Any], Optional[str]]:
    return lambda value: None if value >= minimum else f"must be >= {minimum}, got {value}"


def _positive(value) -> Optional[str]:
    return None if value > 0 else f"must be > 0, got {value}"


def _experiment(value) -> Optional[str]:
    return None if value in EXPERIMENT_NAMES else f"unknown experiment {value!r}, expected one of {list(EXPERIMENT_NAMES)}"


def _algorithms(value) -> Optional[str]:
    unknown = [name for name in value if name not in ALGORITHM_NAMES]
    if unknown:
        return f"unknown algorithms {unknown}, expected a subset of {list(ALGORITHM_NAMES)}"
    if len(set(value)) != len(value):
        return "duplicate algorithm names"
    return None


def _sorted_values(value) -> Optional[str]:
    if not value:
        return "must not be empty"
    if any(b <= a for a, b in zip(value, value[1:])):
        return "must be strictly increasing"
    return None


def _jitter(value) -> Optional[str]:
    return None if 0 <= value < 1 else f"must lie in [0, 1), got {value}"


def _optional_positive(value) -> Optional[str]:
    return None if value is None else _positive(value)


SCHEMA: Dict[str, ConfigField] = {
    "experiment": ConfigField("experiment", _parse_str, _experiment),
    "algorithms": ConfigField("algorithms", _list_of(_parse_str), _algorithms),
    "sweep_values": ConfigField("sweep_values", _list_of(_parse_float), _sorted_values),
    "output_dir": ConfigField("output_dir", _parse_str),
    "N": ConfigField("N", _parse_int, _at_least(1)),
    "T": ConfigField("T", _parse_int, _at_least(1)),
    "beta": ConfigField("beta", _parse_float, _positive),
    "lambda": ConfigField("lam", _parse_float, _at_least(0)),
    "epsilon": ConfigField("epsilon", _parse_float, _positive),
    "runs": ConfigField("runs", _parse_int, _at_least(1)),
    "master_seed": ConfigField("master_seed", _parse_int, _at_least(0)),
    "cnr": ConfigField("cnr", _list_of(_parse_float), lambda v: None if all(c > 0 for c in v) else "all values must be > 0"),
    "grid": ConfigField("grid", _parse_int, _at_least(32)),
    "K": ConfigField("K", _parse_int, lambda v: None if 1 <= v <= 30 else f"must lie in [1, 30], got {v}"),
    "T_f": ConfigField("T_f", _parse_int, _at_least(1)),
    "baseline": ConfigField("baseline", _parse_float, _positive),
    "jitter": ConfigField("jitter", _parse_float, _jitter),
    "max_sweeps": ConfigField("max_sweeps", _parse_int, _at_least(1)),
    "tol": ConfigField("tol", _parse_float, _positive),
    "restarts": ConfigField("restarts", _parse_int, _at_least(1)),
    "infomax_eta0": ConfigField("infomax_eta0", _parse_optional_float, _optional_positive),
    "record_timing": ConfigField("record_timing", _parse_bool),
}

REQUIRED_KEYS = ("experiment",)


def _cross_checks(cfg: SweepConfig) -> List[str]:
    """Ограничения, связывающие несколько ключей"""
    errors = []
    if cfg.experiment != "gini_vs_beta" and not cfg.algorithms:
        errors.append("algorithms: must name at least one algorithm")
    if cfg.T < cfg.N:
        errors.append(f"T: must be >= N ({cfg.N}), got {cfg.T}")
    if cfg.T_f < cfg.K:
        errors.append(f"T_f: must be >= K ({cfg.K}), got {cfg.T_f}")

    values = cfg.sweep_values
    if cfg.experiment in ("isr_vs_T", "isr_vs_N") and any(v != int(v) for v in values if math.isfinite(v)):
        errors.append(f"sweep_values: {cfg.experiment} needs integer values")
    if cfg.experiment == "isr_vs_T" and any(v < cfg.N for v in values):
        errors.append(f"sweep_values: every T must be >= N ({cfg.N})")
    if cfg.experiment == "isr_vs_N" and any(v < 1 or v > cfg.T for v in values):
        errors.append(f"sweep_values: every N must lie in [1, T={cfg.T}]")
    if cfg.experiment in ("gini_vs_beta", "isr_vs_beta", "fmri_cnr") and any(v <= 0 for v in values):
        errors.append("sweep_values: all values must be > 0")
    if cfg.experiment == "isr_vs_lambda" and any(v < 0 for v in values):
        errors.append("sweep_values: all lambda values must be >= 0")
    if any(math.isinf(v) for v in values) and cfg.experiment != "fmri_cnr":
        errors.append("sweep_values: inf is only meaningful for fmri_cnr")
    return errors


def validate_config(cfg: SweepConfig) -> SweepConfig:
    """Проверить уже собранный конфиг (например, после CLI-переопределений)"""
    errors = []
    for key, spec in SCHEMA.items():
        value = getattr(cfg, spec.attr)
        if spec.check is not None and value is not None:
            message = spec.check(value)
            if message:
                errors.append(f"{key}: {message}")
    errors.extend(_cross_checks(cfg))
    if errors:
        raise ConfigError(errors)
    return cfg


def parse_config(text: str, origin: str = "<config>") -> SweepConfig:
    errors: List[str] = []
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}

    for line_num, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{origin}:{line_num}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value_text = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            errors.append(f"{origin}:{line_num}: {key}: unknown key")
            continue
        if key in lines:
            errors.append(f"{origin}:{line_num}: {key}: duplicate key (first set on line {lines[key]})")
            continue
        lines[key] = line_num
        try:
            values[key] = SCHEMA[key].parse(value_text)
        except ValueError as e:
            errors.append(f"{origin}:{line_num}: {key}: cannot parse {value_text!r} ({e})")
            continue
        check = SCHEMA[key].check
        message = check(values[key]) if check is not None and values[key] is not None else None
        if message:
            errors.append(f"{origin}:{line_num}: {key}: {message}")

    for key in REQUIRED_KEYS:
        if key not in values and key not in lines:
            errors.append(f"{origin}: {key}: required key is missing")

    # для fmri_cnr значения CNR можно задать ключом cnr
    if "sweep_values" not in lines and values.get("experiment") == "fmri_cnr" and values.get("cnr"):
        values["sweep_values"] = list(values["cnr"])
    elif "sweep_values" not in lines:
        errors.append(f"{origin}: sweep_values: required key is missing")

    if errors:
        raise ConfigError(errors)

    kwargs = {SCHEMA[key].attr: value for key, value in values.items()}
    kwargs.setdefault("algorithms", [])
    try:
        cfg = SweepConfig(source_text=text, **kwargs)
    except TypeError as e:
        raise ConfigError([f"{origin}: {e}"])
    try:
        return validate_config(cfg)
    except ConfigError as e:
        raise ConfigError([f"{origin}: {message}" for message in e.errors])


def load_config(path: str) -> SweepConfig:
    """
    Прочитать и проверить конфиг.

    Raises:
        ConfigError: со списком всех найденных ошибок
    """
    with open(path) as f:
        text = f.read()
    return parse_config(text, origin=path)


def save_config(cfg: SweepConfig, path: str):
    """Записать все ключи (None не пишется)"""
    with open(path, "w") as f:
        f.write(f"# {cfg.experiment}\n")
        for key, value in cfg.to_dict().items():
            if value is None:
                continue
            f.write(f"{key} = {_format_value(value)}\n")


def override(cfg: SweepConfig, **changes) -> SweepConfig:
    """Переопределения из CLI (значения None игнорируются) с повторной проверкой"""
    changes = {name: value for name, value in changes.items() if value is not None}
    return validate_config(replace(cfg, **changes)) if changes else cfg
