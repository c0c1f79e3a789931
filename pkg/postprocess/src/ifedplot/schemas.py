"""Readers and schema validation for the solver's on-disk formats.

This package talks to the solver exclusively through its file formats:
RFC-4180 CSV series/summaries with one header row, and `ifedfield v1` dumps
(two-line text header followed by CSV blocks or raw little-endian float64).
Inputs are never modified.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "read_series", "read_summary", "read_field"]


class SchemaError(ValueError):
    pass


def read_series(path, require=()):
    """CSV with a header row; returns {column: array}.

    Missing required columns raise a SchemaError that names them and diffs
    the expected set against what the file carries.
    """
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a CSV header")
        rows = [row for row in reader if row]
    missing = [c for c in require if c not in header]
    if missing:
        raise SchemaError(
            f"{path}: missing column(s) {missing}; expected {list(require)}, "
            f"found {header}"
        )
    data = np.array([[float(v) for v in row] for row in rows]) if rows else \
        np.zeros((0, len(header)))
    return {name: data[:, k] for k, name in enumerate(header)}


def read_summary(path):
    """One-row CSV summary; returns {column: float-or-string}."""
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
            values = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: expected a header row and a value row")
    out = {}
    for name, value in zip(header, values):
        try:
            out[name] = float(value)
        except ValueError:
            out[name] = value
    return out


def read_field(path):
    """`ifedfield v1` dump; returns (meta, u, v, p)."""
    path = Path(path)
    with open(path, "rb") as f:
        magic = f.readline().decode().split()
        if magic[:2] != ["ifedfield", "v1"] or len(magic) < 3:
            raise SchemaError(f"{path}: not an ifedfield v1 file")
        fmt = magic[2]
        parts = f.readline().decode().split()
        if len(parts) != 6:
            raise SchemaError(f"{path}: malformed ifedfield metadata line")
        nx, ny = int(parts[0]), int(parts[1])
        meta = {"nx": nx, "ny": ny, "h": float(parts[2]), "x0": float(parts[3]),
                "y0": float(parts[4]), "t": float(parts[5])}
        shapes = [(nx + 1, ny), (nx, ny + 1), (nx, ny)]
        arrays = []
        if fmt == "bin":
            for shape in shapes:
                count = shape[0] * shape[1]
                buf = f.read(8 * count)
                if len(buf) != 8 * count:
                    raise SchemaError(f"{path}: truncated binary block")
                arrays.append(np.frombuffer(buf, "<f8").reshape(shape))
        elif fmt == "csv":
            reader = csv.reader(f.read().decode().splitlines())
            blocks, current, rows = {}, None, []
            for row in reader:
                if len(row) == 1 and row[0] in ("u", "v", "p"):
                    if current:
                        blocks[current] = rows
                    current, rows = row[0], []
                elif row:
                    rows.append([float(v) for v in row])
            if current:
                blocks[current] = rows
            for name, shape in zip(("u", "v", "p"), shapes):
                if name not in blocks:
                    raise SchemaError(f"{path}: missing block {name!r}")
                arr = np.array(blocks[name])
                if arr.shape != shape:
                    raise SchemaError(
                        f"{path}: block {name!r} has shape {arr.shape}, "
                        f"expected {shape}"
                    )
                arrays.append(arr)
        else:
            raise SchemaError(f"{path}: unknown ifedfield format {fmt!r}")
    return meta, *arrays
