import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional

from dotenv import dotenv_values, load_dotenv

load_dotenv()

DEFAULT_STEP_CAP = 10_000
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class ConfigError(ValueError):
    """Raised for invalid trial, sweep or environment configuration."""


@dataclass(frozen=True)
class Settings:
    threads: int
    step_cap: int
    log_level: str
    output_dir: str


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"{name} must be >= 1, got {value}")
    return value


def get_settings() -> Settings:
    """
    Read runtime settings from the environment (and a .env file if present).
    """
    return Settings(
        threads=_int_env("MAMT_THREADS", os.cpu_count() or 1),
        step_cap=_int_env("MAMT_STEP_CAP", DEFAULT_STEP_CAP),
        log_level=os.getenv("MAMT_LOG_LEVEL", "WARNING").upper(),
        output_dir=os.getenv("MAMT_OUTPUT_DIR", "results"),
    )


def configure_logging(level: Optional[str] = None) -> None:
    level_name = (level or get_settings().log_level).upper()
    numeric = logging.getLevelName(level_name)
    if not isinstance(numeric, int):
        raise ConfigError(f"Unknown log level {level_name!r}")
    root = logging.getLogger()
    if not any(getattr(h, "_mamt", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._mamt = True
        root.addHandler(handler)
    root.setLevel(numeric)


def load_config_file(path: str) -> Dict[str, str]:
    """
    Load a flat `key = value` config file. Keys are normalised to the CLI
    flag spelling with underscores (`maze-sizes` and `maze_sizes` are the same
    key). Empty values are dropped so that they never override defaults.
    """
    if not Path(path).is_file():
        raise ConfigError(f"Config file not found: {path}")
    values = dotenv_values(path)
    config = {}
    for key, value in values.items():
        if value is None or value.strip() == "":
            continue
        config[key.strip().lower().replace("-", "_")] = value.strip()
    return config
