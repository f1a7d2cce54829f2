"""Configuration helpers for the hyphull command line."""

from __future__ import annotations

import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from dotenv import dotenv_values, load_dotenv

from hyphull.exceptions import InvalidConfigError

load_dotenv()

DEFAULT_SEED = 20240917
DEFAULT_THREADS = 1
LOG_LEVEL = os.getenv("HYPHULL_LOG_LEVEL", "WARNING").upper()
LOG_FORMAT = os.getenv("HYPHULL_LOG_FORMAT", "json").lower()
OUTPUT_DIR = Path(os.getenv("HYPHULL_OUTPUT_DIR", "results"))


def get_default_seed() -> int:
    """Root seed from HYPHULL_SEED, falling back to the built-in default."""
    raw_value = os.getenv("HYPHULL_SEED")
    if raw_value is None or not raw_value.strip():
        return DEFAULT_SEED
    try:
        return int(raw_value.strip(), 0)
    except ValueError as exc:
        raise InvalidConfigError(f"HYPHULL_SEED must be an integer, got {raw_value!r}") from exc


def get_default_threads() -> int:
    """Worker count from HYPHULL_THREADS."""
    raw_value = os.getenv("HYPHULL_THREADS", str(DEFAULT_THREADS))
    try:
        return max(1, int(raw_value))
    except ValueError as exc:
        raise InvalidConfigError(f"HYPHULL_THREADS must be an integer, got {raw_value!r}") from exc


def normalize_key(key: str) -> str:
    return key.strip().lstrip("-").lower().replace("-", "_")


def load_config_file(path: Path) -> dict[str, str]:
    """Read a flat key=value file; keys are normalized like command-line flags."""
    if not path.is_file():
        raise InvalidConfigError(f"config file {path} does not exist")
    return {
        normalize_key(key): value
        for key, value in dotenv_values(path).items()
        if value is not None
    }


def resolve_settings(
    flags: Mapping[str, Any],
    file_values: Mapping[str, str] | None = None,
) -> dict[str, Any]:
    """Merge configuration layers: flags, then the config file, then the environment.

    Flags left at ``None`` fall through to the next layer; anything missing everywhere is
    left to the settings model defaults.
    """
    merged: dict[str, Any] = {"seed": get_default_seed(), "threads": get_default_threads()}
    merged.update(file_values or {})
    merged.update({key: value for key, value in flags.items() if value is not None})
    return merged


__all__ = [
    "DEFAULT_SEED",
    "LOG_FORMAT",
    "LOG_LEVEL",
    "OUTPUT_DIR",
    "get_default_seed",
    "get_default_threads",
    "load_config_file",
    "normalize_key",
    "resolve_settings",
]
