"""Deterministic artifact writers: JSON reports, CSV tables, two-column series."""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
import platform
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np


def clean(obj):
    """Convert numpy containers/scalars to plain Python; non-finite floats become None."""
    if isinstance(obj, Mapping):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")


def write_series(path: Path, x, y) -> None:
    """Two whitespace-separated columns in full double precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    with path.open("w", encoding="utf-8") as fh:
        for a, b in zip(x, y):
            fh.write(f"{a!r} {b!r}\n")


def scalar_columns(report: Mapping, prefix: str = "") -> dict:
    """Flatten nested dicts, keeping only scalar leaves."""
    out = {}
    for k, v in clean(report).items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(scalar_columns(v, key + "."))
        elif v is None or isinstance(v, (int, float, str, bool)):
            out[key] = v
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path: Path, rows: Iterable[Mapping], leading: tuple = ()) -> None:
    rows = list(rows)
    keys = set()
    for r in rows:
        keys.update(r)
    header = [k for k in leading if k in keys] + sorted(keys - set(leading))
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=",", lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(r.get(k)) for k in header])


def metadata(extra: Mapping | None = None) -> dict:
    """Volatile run information, kept out of the deterministic reports."""
    import scipy
    from . import __version__
    md = {"timestamp_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(),
          "python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
          "hardylab": __version__, "host": platform.node()}
    if extra:
        md.update(extra)
    return md


def write_columns(path: Path, columns: Mapping) -> None:
    """CSV with one column per key (all columns must have equal length)."""
    names = list(columns)
    cols = [np.asarray(columns[k], dtype=float).ravel() for k in names]
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=",", lineterminator="\n")
        w.writerow(names)
        for row in zip(*cols):
            w.writerow([repr(float(v)) for v in row])
