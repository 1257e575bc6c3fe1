"""Plain-text serialisation of fields, reports and plot data.

Floats are written with ``repr``, the shortest string that round-trips, so
identical runs give byte-identical files.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigError
from .grid import RealField, make_grid

__all__ = ["SCHEMA", "write_field", "read_field", "write_csv", "read_csv", "write_plot_data"]

SCHEMA = 1


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _ensure_parent(path):
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_field(path, field):
    """Header ``# schema=1`` and ``# n_dims=..,L=..,N=..``, then row-major samples."""
    grid = field.grid
    _ensure_parent(path)
    rows = np.atleast_2d(field.values)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema={SCHEMA}\n")
        fh.write(f"# n_dims={grid.n_dims},L={grid.L!r},N={grid.N}\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_field(path):
    header = {}
    with open(path, encoding="utf-8") as fh:
        for _ in range(2):
            line = fh.readline()
            if not line.startswith("#"):
                raise ConfigError(f"{path}: missing field header")
            for item in line[1:].strip().split(","):
                key, _, value = item.partition("=")
                header[key.strip()] = value.strip()
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    if int(header.get("schema", -1)) != SCHEMA:
        raise ConfigError(f"{path}: unsupported schema {header.get('schema')!r}")
    try:
        grid = make_grid(int(header["n_dims"]), float(header["L"]), int(header["N"]))
    except KeyError as exc:
        raise ConfigError(f"{path}: header lacks {exc.args[0]!r}") from exc
    values = data[0] if grid.n_dims == 1 else data
    return RealField(grid, values)


def write_csv(path, columns, rows):
    """One header line, then one line per row in the given column order."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        columns = fh.readline().strip().split(",")
        return [dict(zip(columns, line.strip().split(","))) for line in fh if line.strip()]


def write_plot_data(path, x, y):
    """Two whitespace-separated columns, one point per line."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in zip(x, y):
            fh.write(f"{_fmt(float(a))} {_fmt(float(b))}\n")
