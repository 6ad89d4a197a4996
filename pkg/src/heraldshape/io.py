"""Deterministic CSV/JSON dataset writers with atomic replacement."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Units:
    """Scale from dimensionless times (units of t_c) to a physical unit."""

    label: str = "t_c"
    scale: float = 1.0

    def time(self, t):
        return np.asarray(t, dtype=float) * self.scale

    def rate(self, r):
        return np.asarray(r, dtype=float) / self.scale

    def density(self, x):
        """A density per unit time (e.g. an intensity) in the physical unit."""
        return np.asarray(x, dtype=float) / self.scale

    def amplitude(self, x):
        return np.asarray(x) / np.sqrt(self.scale)


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_atomic(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_table(path: Path, columns: Sequence[str], data: Sequence[np.ndarray],
                fmt: str = "csv") -> Path:
    """Write equal-length columns as CSV (header row) or JSON records.

    The file suffix is replaced by the format name.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}")
    arrays = [np.asarray(d, dtype=float) for d in data]
    n = len(arrays[0])
    if any(len(a) != n for a in arrays):
        raise ValueError("columns differ in length")
    path = Path(path).with_suffix("." + fmt)
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(a[i]) for a in arrays) for i in range(n)]
        return write_atomic(path, "\n".join(lines) + "\n")
    records = [{c: float(_fmt(a[i])) for c, a in zip(columns, arrays)} for i in range(n)]
    return write_atomic(path, json.dumps(records, indent=1) + "\n")


def write_json(path: Path, obj) -> Path:
    return write_atomic(Path(path), json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_table(path: Path) -> dict[str, np.ndarray]:
    """Read back a CSV or JSON table written by `write_table`."""
    path = Path(path)
    if path.suffix == ".json":
        records = json.loads(path.read_text())
        return {k: np.array([r[k] for r in records]) for k in records[0]}
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {name: np.atleast_1d(data[name]) for name in data.dtype.names}
