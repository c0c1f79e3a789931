"""Independent reference computations used by the test suite.

These deliberately avoid the code paths they check: B-splines come from a
dense-grid convolution recursion, the smoothed IB kernels from a per-offset
linear-condition solve with root continuation, and stress tensors from
finite differences of the energy.
"""

import numpy as np


def bspline_by_convolution(order: int, x):
    """B-spline values via the integral recursion evaluated on a dense grid.

    phi_n(x) = integral of phi_{n-1} over [x - 1/2, x + 1/2], computed with a
    cumulative trapezoid at spacing 2**-15 (error well under 1e-8).
    """
    step = 2.0**-15
    half_span = 0.5 * (order + 1) + 1.0
    grid = np.arange(-half_span, half_span + step, step)
    # first pass: the integral of the indicator is elementary, avoiding the
    # O(step) trapezoid error across its jumps; later integrands are continuous
    vals = np.clip(grid + 0.5, -0.5, 0.5) - np.clip(grid - 0.5, -0.5, 0.5)
    for _ in range(order - 1):
        cumulative = np.concatenate(
            [[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * step)]
        )
        upper = np.interp(grid + 0.5, grid, cumulative)
        lower = np.interp(grid - 0.5, grid, cumulative)
        vals = upper - lower
    return np.interp(np.asarray(x, dtype=float), grid, vals, left=0.0, right=0.0)


def smoothed_stencil_by_condition_solve(support: int, K: float, C: float, rs):
    """Solve the defining conditions of the smoothed 5/6-point kernels per offset.

    For each canonical offset r the linear moment conditions leave one degree
    of freedom; the sum-of-squares closure gives a quadratic whose root is
    tracked by continuation from the support edge (where the outermost value
    vanishes).  Returns (first_indices, weights) like stencil_1d.
    """
    if support == 5:
        offsets = np.arange(-2, 3)
        edge = -0.5

        def rows(s):
            return np.array([np.ones_like(s), s, s**2, s**3])

        rhs = np.array([1.0, 0.0, K, 0.0])
    elif support == 6:
        offsets = np.arange(-2, 4)
        edge = 0.0

        def rows(s):
            even = (offsets % 2 == 0).astype(float)
            return np.array([even, 1.0 - even, s, s**2, s**3])

        rhs = np.array([0.5, 0.5, 0.0, K, 0.0])
    else:
        raise ValueError(support)

    rs = np.asarray(rs, dtype=float)
    order = np.argsort(np.abs(rs - edge))
    weights = np.empty((rs.size, support))
    prev = None
    for idx in order:
        r = rs[idx]
        s = r - offsets
        M = rows(s)
        y_p = np.linalg.lstsq(M, rhs, rcond=None)[0]
        _, _, vt = np.linalg.svd(M)
        null = vt[-1]
        a = null @ null
        b = 2.0 * (y_p @ null)
        c = y_p @ y_p - C
        disc = max(b * b - 4.0 * a * c, 0.0)
        roots = [(-b + sg * np.sqrt(disc)) / (2.0 * a) for sg in (+1.0, -1.0)]
        cands = [y_p + t * null for t in roots]
        if prev is None:
            # at the edge the outermost stencil value is zero
            pick = min(cands, key=lambda y: abs(y[-1]))
        else:
            pick = min(cands, key=lambda y: np.linalg.norm(y - prev))
        weights[idx] = pick
        prev = pick

    if support == 5:
        first = np.floor(rs + 0.5).astype(np.int64) - 2
    else:
        first = np.floor(rs).astype(np.int64) - 2
    return first, weights


def finite_difference_pk1(energy, F, step=1e-6):
    """Central finite-difference gradient of a scalar energy w.r.t. a 2x2 F."""
    F = np.asarray(F, dtype=float)
    P = np.zeros_like(F)
    for i in range(2):
        for j in range(2):
            Fp, Fm = F.copy(), F.copy()
            Fp[i, j] += step
            Fm[i, j] -= step
            P[i, j] = (energy(Fp) - energy(Fm)) / (2.0 * step)
    return P
