"""The three figure kinds: series traces, log-log convergence, field images.

Outputs are deterministic (fixed SVG hash salt, no embedded timestamps) so
re-running a job reproduces the same bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ifedplot"

import matplotlib.pyplot as plt

from .schemas import SchemaError, read_field, read_series, read_summary

__all__ = ["plot_timeseries", "plot_convergence", "plot_field_magnitude",
           "fit_loglog_slope"]


def _save(fig, out_path):
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Date": None} if
                out_path.suffix == ".svg" else None)
    plt.close(fig)
    return out_path


def plot_timeseries(csv_paths, columns, out_path, title=None, xlabel="t",
                    ylabel=None, labels=None):
    """Overlay selected columns from one or more series CSVs against time."""
    if isinstance(csv_paths, (str, Path)):
        csv_paths = [csv_paths]
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for k, path in enumerate(csv_paths):
        data = read_series(path, require=("t", *columns))
        prefix = "" if labels is None else f"{labels[k]} "
        for col in columns:
            ax.plot(data["t"], data[col],
                    label=f"{prefix}{col}" if (labels or len(columns) > 1)
                    else col)
    ax.set_xlabel(xlabel)
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    return _save(fig, out_path)


def fit_loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise SchemaError("need at least two points for a slope fit")
    if np.any(x <= 0) or np.any(y <= 0):
        raise SchemaError("log-log fit needs positive data")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def plot_convergence(inputs, out_path, column="l2", title=None):
    """Log-log error plot with a fitted slope annotation.

    inputs: either summary.csv paths (x = grid spacing 1/n, y = column) or a
    single two-column CSV whose header names the x and error columns.
    Returns (path, slope).
    """
    if isinstance(inputs, (str, Path)):
        inputs = [inputs]
    xs, ys = [], []
    if len(inputs) == 1 and _looks_tabular(inputs[0], column):
        data = read_series(inputs[0])
        names = list(data)
        xs = np.asarray(data[names[0]])
        ys = np.asarray(data[column if column in data else names[1]])
    else:
        for path in inputs:
            summary = read_summary(path)
            if column not in summary:
                raise SchemaError(
                    f"{path}: no column {column!r}; found {list(summary)}"
                )
            xs.append(1.0 / float(summary["n"]))
            ys.append(float(summary[column]))
        xs, ys = np.asarray(xs), np.asarray(ys)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    slope = fit_loglog_slope(xs, ys)

    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    ax.loglog(xs, ys, "o-", label=column)
    ref = ys[-1] * (xs / xs[-1]) ** round(slope) if round(slope) > 0 else None
    if ref is not None:
        ax.loglog(xs, ref, "k--", alpha=0.5,
                  label=f"order {round(slope)} reference")
    ax.set_xlabel("grid spacing")
    ax.set_ylabel(f"{column} error")
    ax.set_title(title or f"fitted slope {slope:.2f}")
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, out_path)
    return Path(out_path), slope


def _looks_tabular(path, column):
    try:
        data = read_series(path)
    except (SchemaError, ValueError):
        return False
    return len(data) >= 2 and all(arr.size >= 2 for arr in data.values())


def plot_field_magnitude(field_path, out_path, title=None):
    """Velocity-magnitude image of an ifedfield dump; returns (path, argmax).

    The magnitude is formed at cell centers by averaging the face components;
    argmax is the (i, j) cell index of the peak speed.
    """
    meta, u, v, p = read_field(field_path)
    uc = 0.5 * (u[:-1, :] + u[1:, :])
    vc = 0.5 * (v[:, :-1] + v[:, 1:])
    speed = np.sqrt(uc**2 + vc**2)
    nx, ny, h = meta["nx"], meta["ny"], meta["h"]
    x = meta["x0"] + (np.arange(nx + 1)) * h
    y = meta["y0"] + (np.arange(ny + 1)) * h

    fig, ax = plt.subplots(figsize=(7.0, 3.8))
    mesh = ax.pcolormesh(x, y, speed.T, shading="flat", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="|u|")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title or f"t = {meta['t']:g}")
    _save(fig, out_path)
    argmax = np.unravel_index(int(np.argmax(speed)), speed.shape)
    return Path(out_path), argmax
