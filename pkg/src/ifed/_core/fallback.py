"""Pure-numpy implementations of the hot inner loops.

Semantically identical to the compiled extension; selected automatically when
the extension is unavailable or when IFED_BACKEND=numpy.
"""

import numpy as np


def scatter_stencil(field, i0, j0, wx, wy, vals):
    """field[i0+a, j0+b] += wx[:,a] wy[:,b] vals, clipping out-of-range faces.

    Returns the number of clipped stencil entries.
    """
    n, s = wx.shape
    I, J = np.broadcast_arrays(
        i0[:, None, None] + np.arange(s)[None, :, None],
        j0[:, None, None] + np.arange(s)[None, None, :],
    )
    W = wx[:, :, None] * wy[:, None, :] * vals[:, None, None]
    mask = (I >= 0) & (I < field.shape[0]) & (J >= 0) & (J < field.shape[1])
    np.add.at(field, (I[mask], J[mask]), W[mask])
    return int(mask.size - mask.sum())


def gather_stencil(field, i0, j0, wx, wy):
    """sum_ab field[i0+a, j0+b] wx[:,a] wy[:,b]; out-of-range faces read 0."""
    n, s = wx.shape
    I, J = np.broadcast_arrays(
        i0[:, None, None] + np.arange(s)[None, :, None],
        j0[:, None, None] + np.arange(s)[None, None, :],
    )
    mask = (I >= 0) & (I < field.shape[0]) & (J >= 0) & (J < field.shape[1])
    vals = np.zeros(I.shape)
    vals[mask] = field[I[mask], J[mask]]
    return np.einsum("pab,pa,pb->p", vals, wx, wy)


def rbgs_sweep(x, rhs, h2, color):
    """One red-black Gauss-Seidel color pass on a ghost-padded array.

    x is (n+2, m+2) with ghosts already filled; rhs is (n, m); updates the
    interior cells with (i + j) % 2 == color for interior indices (i, j).
    """
    n, m = rhs.shape
    for istart in (0, 1):
        jstart = (color - istart) % 2
        xi = x[1 + istart:n + 1:2, 1 + jstart:m + 1:2]
        south = x[1 + istart:n + 1:2, jstart:m:2]
        north = x[1 + istart:n + 1:2, 2 + jstart:m + 2:2]
        west = x[istart:n:2, 1 + jstart:m + 1:2]
        east = x[2 + istart:n + 2:2, 1 + jstart:m + 1:2]
        xi[...] = 0.25 * (south + north + west + east
                          - h2 * rhs[istart::2, jstart::2])


def laplace_residual(x, rhs, h2, out):
    """out = rhs - lap(x) on the interior of a ghost-padded array."""
    n, m = rhs.shape
    c = x[1:n + 1, 1:m + 1]
    lap = (x[:n, 1:m + 1] + x[2:, 1:m + 1] + x[1:n + 1, :m]
           + x[1:n + 1, 2:] - 4.0 * c) / h2
    np.subtract(rhs, lap, out=out)


def laplace_apply(x, h2, out):
    """out = lap(x) on the interior of a ghost-padded array."""
    n, m = out.shape
    c = x[1:n + 1, 1:m + 1]
    out[...] = (x[:n, 1:m + 1] + x[2:, 1:m + 1] + x[1:n + 1, :m]
                + x[1:n + 1, 2:] - 4.0 * c) / h2


def fill_phi_ghosts(xp, cl, cr, cb, ct):
    """Ghost ring for the cell-centered solves: 0 Neumann, 1 Dirichlet0,
    2 periodic."""
    n, m = xp.shape[0] - 2, xp.shape[1] - 2
    if cl == 2:
        xp[0, 1:m + 1] = xp[n, 1:m + 1]
        xp[n + 1, 1:m + 1] = xp[1, 1:m + 1]
    else:
        xp[0, 1:m + 1] = xp[1, 1:m + 1] if cl == 0 else -xp[1, 1:m + 1]
        xp[n + 1, 1:m + 1] = xp[n, 1:m + 1] if cr == 0 else -xp[n, 1:m + 1]
    if cb == 2:
        xp[1:n + 1, 0] = xp[1:n + 1, m]
        xp[1:n + 1, m + 1] = xp[1:n + 1, 1]
    else:
        xp[1:n + 1, 0] = xp[1:n + 1, 1] if cb == 0 else -xp[1:n + 1, 1]
        xp[1:n + 1, m + 1] = xp[1:n + 1, m] if ct == 0 else -xp[1:n + 1, m]
    xp[0, 0] = xp[1, 1]
    xp[0, m + 1] = xp[1, m]
    xp[n + 1, 0] = xp[n, 1]
    xp[n + 1, m + 1] = xp[n, m]


def helmholtz_residual(xp, rhs, a, b, out):
    lap5 = (xp[:-2, 1:-1] + xp[2:, 1:-1] + xp[1:-1, :-2] + xp[1:-1, 2:]
            - 4.0 * xp[1:-1, 1:-1])
    np.subtract(rhs, a * xp[1:-1, 1:-1] - b * lap5, out=out)
    return float(np.max(np.abs(out)))
