"""Deterministic CSV writing and JSON parameter files."""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, TextIO

import numpy as np

from .model import ModelParams, params_to_dict, validate_params

SIGNIFICANT_DIGITS = 12
PRESET_NAMES = ("fig_spectrum_a", "fig_spectrum_b", "fig_twomode")


def format_number(x: Any) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if np.isnan(x):
        return "nan"
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


def write_csv(
    stream: TextIO,
    columns: Sequence[str],
    data: Sequence[Iterable[Any]],
    metadata: Mapping[str, Any] | None = None,
) -> None:
    """Write ``# key: value`` metadata lines, a header row, then one row per sample."""
    for key, value in (metadata or {}).items():
        stream.write(f"# {key}: {value}\n")
    stream.write(",".join(columns) + "\n")
    arrays = [np.asarray(col) for col in data]
    for row in zip(*arrays):
        stream.write(",".join(format_number(v) for v in row) + "\n")


def read_csv_columns(path: str | Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                return [c.strip() for c in line.strip().split(",")]
    return []


def dumps_params(p: ModelParams) -> str:
    """Canonical JSON text of a parameter set (stable key order, trailing newline)."""
    return json.dumps(params_to_dict(p), indent=2) + "\n"


def load_params_file(path: str | Path) -> ModelParams:
    with open(path, encoding="utf-8") as fh:
        return validate_params(json.load(fh))


def preset_text(name: str) -> str:
    if name not in PRESET_NAMES:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    return resources.files("wga.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_preset(name: str) -> ModelParams:
    return validate_params(json.loads(preset_text(name)))
