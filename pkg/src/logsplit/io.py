"""CSV/JSON writers shared by the harness and the CLI."""
from __future__ import annotations

import csv
import json
import math
import subprocess
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .grid import Field

NORM_CONVENTIONS = {
    "dft": "unnormalized forward FFT, 1/prod(N) on the inverse",
    "l2": "sqrt(prod(h) * sum |u|^2)",
    "h1": "sqrt(||u||^2 + sum_j ||d_j u||^2), d_j spectral",
    "linf": "max |u|",
    "density_l1": "prod(h) * sum | |u|^2 - |v|^2 |",
    "energy": "spectral kinetic term + trapezoidal potential term",
}


def format_number(x) -> str:
    """Shortest round-trip decimal; scientific notation when ``|x| < 1e-3`` or ``|x| >= 1e6``."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x != 0 and (abs(x) < 1e-3 or abs(x) >= 1e6):
        return np.format_float_scientific(x, unique=True, trim="0")
    return np.format_float_positional(x, unique=True, trim="0")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else format_number(v) for v in row])
    return path


def write_columns(path, columns: dict[str, np.ndarray]) -> Path:
    header = list(columns)
    return write_csv(path, header, zip(*columns.values()))


def write_field(path, f: Field) -> Path:
    """One row per grid node: index columns, coordinates, re, im, density."""
    d = f.domain
    idx = np.indices(d.shape).reshape(d.dim, -1)
    coords = [c.ravel() for c in d.mesh()]
    vals = f.values.ravel()
    names = "ijk"[: d.dim]
    axes = "xyz"[: d.dim]
    header = list(names) + list(axes) + ["re", "im", "density"]
    cols = list(idx) + coords + [vals.real, vals.imag, np.abs(vals) ** 2]
    return write_csv(path, header, zip(*cols))


def version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_meta(out_dir, config: dict[str, Any], **extra) -> Path:
    path = Path(out_dir) / "meta.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"config": config, "conventions": NORM_CONVENTIONS, "version": version_string(), **extra}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default))
    return path


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")
