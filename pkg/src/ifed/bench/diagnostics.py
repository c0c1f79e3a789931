"""Benchmark diagnostics: Strouhal numbers, error norms, series summaries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "StrouhalResult",
    "compute_strouhal",
    "error_norms",
    "oscillation_summary",
    "validate_series",
]


@dataclass
class StrouhalResult:
    value: float
    frequency: float
    periods_used: int


def compute_strouhal(t, y, d_ref: float, u_ref: float,
                     window: float = 0.5) -> StrouhalResult:
    """St = f d / u with f from the mean zero-crossing spacing of the
    mean-removed signal over the trailing `window` fraction of the series."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if t.size < 4:
        raise ValueError("series too short for frequency estimation")
    start = int(round(t.size * (1.0 - window)))
    t, y = t[start:], y[start:]
    y = y - y.mean()
    s = np.sign(y)
    s[s == 0] = 1.0
    flips = np.nonzero(np.diff(s) != 0)[0]
    if flips.size < 2:
        raise ValueError("no oscillation detected")
    # linear interpolation of each crossing time
    tc = t[flips] - y[flips] * (t[flips + 1] - t[flips]) / (y[flips + 1] - y[flips])
    spacing = np.diff(tc).mean()
    freq = 1.0 / (2.0 * spacing)
    periods = int((tc[-1] - tc[0]) / (2.0 * spacing))
    return StrouhalResult(freq * d_ref / u_ref, freq, periods)


def oscillation_summary(t, y, window: float = 0.2):
    """(mid, amplitude) of the trailing window: (max+min)/2 and (max-min)/2."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    cut = t[-1] - window * (t[-1] - t[0])
    tail = y[t >= cut]
    return (0.5 * (tail.max() + tail.min()), 0.5 * (tail.max() - tail.min()))


def error_norms(pairs, h: float):
    """Discrete L1/L2/Linf norms weighted by h^2 over masked face arrays.

    pairs: iterable of (error_array, mask_array or None).
    """
    total_abs = 0.0
    total_sq = 0.0
    linf = 0.0
    for err, mask in pairs:
        err = np.asarray(err, dtype=float)
        if mask is not None:
            err = err[mask]
        if err.size == 0:
            continue
        total_abs += float(np.sum(np.abs(err)))
        total_sq += float(np.sum(err * err))
        linf = max(linf, float(np.max(np.abs(err))))
    return {
        "l1": h * h * total_abs,
        "l2": float(np.sqrt(h * h * total_sq)),
        "linf": linf,
    }


def validate_series(rows: np.ndarray) -> None:
    """A successful run yields strictly increasing time and no NaN rows."""
    if rows.size == 0:
        return
    t = rows[:, 0]
    if np.any(np.diff(t) <= 0.0):
        raise ValueError("time column is not strictly increasing")
    if np.any(~np.isfinite(rows)):
        raise ValueError("series contains non-finite entries")
