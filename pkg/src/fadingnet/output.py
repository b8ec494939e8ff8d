"""Deterministic CSV and JSON run manifests."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np


def format_value(x) -> str:
    """Shortest round-trip text; scientific notation outside [1e-4, 1e6]."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if 1e-4 <= abs(x) <= 1e6:
        return np.format_float_positional(x, unique=True, trim="-")
    return np.format_float_scientific(x, unique=True, trim="-")


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(csv_text(header, rows))
    return path


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, config_echo: dict, seed: int, tool_version: str, started_at: str,
                   wall_seconds: float, output_files) -> Path:
    path = Path(path)
    manifest = {
        "config": config_echo,
        "seed": seed,
        "tool_version": tool_version,
        "started_at": started_at,
        "wall_seconds": wall_seconds,
        "output_files": [{"path": Path(p).name, "sha256": sha256(p)} for p in output_files],
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def check_manifest(path) -> bool:
    """True when every file listed in the manifest exists beside it with a matching digest."""
    path = Path(path)
    data = json.loads(path.read_text())
    for entry in data["output_files"]:
        f = path.parent / entry["path"]
        if not f.is_file() or sha256(f) != entry["sha256"]:
            return False
    return True
