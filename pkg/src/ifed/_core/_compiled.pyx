# Hot inner loops: delta-function scatter/gather and red-black smoothing.
# Mirrors ifed._core.fallback; both backends must stay drop-in replacements.

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scatter_stencil(double[:, ::1] field, long[::1] i0, long[::1] j0,
                    double[:, ::1] wx, double[:, ::1] wy, double[::1] vals):
    cdef Py_ssize_t n = wx.shape[0]
    cdef Py_ssize_t s = wx.shape[1]
    cdef Py_ssize_t ni = field.shape[0]
    cdef Py_ssize_t nj = field.shape[1]
    cdef Py_ssize_t p, a, b, i, j
    cdef long clipped = 0
    cdef double wxa, v
    for p in range(n):
        v = vals[p]
        for a in range(s):
            i = i0[p] + a
            if i < 0 or i >= ni:
                clipped += s
                continue
            wxa = wx[p, a] * v
            for b in range(s):
                j = j0[p] + b
                if j < 0 or j >= nj:
                    clipped += 1
                    continue
                field[i, j] += wxa * wy[p, b]
    return clipped


def gather_stencil(double[:, ::1] field, long[::1] i0, long[::1] j0,
                   double[:, ::1] wx, double[:, ::1] wy):
    cdef Py_ssize_t n = wx.shape[0]
    cdef Py_ssize_t s = wx.shape[1]
    cdef Py_ssize_t ni = field.shape[0]
    cdef Py_ssize_t nj = field.shape[1]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n)
    cdef double[::1] ov = out
    cdef Py_ssize_t p, a, b, i, j
    cdef double acc, row
    for p in range(n):
        acc = 0.0
        for a in range(s):
            i = i0[p] + a
            if i < 0 or i >= ni:
                continue
            row = 0.0
            for b in range(s):
                j = j0[p] + b
                if j < 0 or j >= nj:
                    continue
                row += field[i, j] * wy[p, b]
            acc += wx[p, a] * row
        ov[p] = acc
    return out


def rbgs_sweep(double[:, ::1] x, double[:, ::1] rhs, double h2, int color):
    cdef Py_ssize_t n = rhs.shape[0]
    cdef Py_ssize_t m = rhs.shape[1]
    cdef Py_ssize_t i, j, jstart
    for i in range(n):
        jstart = (color - i) % 2
        if jstart < 0:
            jstart += 2
        for j in range(jstart, m, 2):
            x[i + 1, j + 1] = 0.25 * (
                x[i, j + 1] + x[i + 2, j + 1] + x[i + 1, j] + x[i + 1, j + 2]
                - h2 * rhs[i, j]
            )


def laplace_residual(double[:, ::1] x, double[:, ::1] rhs, double h2,
                     double[:, ::1] out):
    cdef Py_ssize_t n = rhs.shape[0]
    cdef Py_ssize_t m = rhs.shape[1]
    cdef Py_ssize_t i, j
    cdef double inv = 1.0 / h2
    for i in range(n):
        for j in range(m):
            out[i, j] = rhs[i, j] - (
                x[i, j + 1] + x[i + 2, j + 1] + x[i + 1, j] + x[i + 1, j + 2]
                - 4.0 * x[i + 1, j + 1]
            ) * inv


def laplace_apply(double[:, ::1] x, double h2, double[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t m = out.shape[1]
    cdef Py_ssize_t i, j
    cdef double inv = 1.0 / h2
    for i in range(n):
        for j in range(m):
            out[i, j] = (
                x[i, j + 1] + x[i + 2, j + 1] + x[i + 1, j] + x[i + 1, j + 2]
                - 4.0 * x[i + 1, j + 1]
            ) * inv


def fill_phi_ghosts(double[:, ::1] xp, int cl, int cr, int cb, int ct):
    # codes: 0 Neumann, 1 homogeneous Dirichlet, 2 periodic
    cdef Py_ssize_t n = xp.shape[0] - 2
    cdef Py_ssize_t m = xp.shape[1] - 2
    cdef Py_ssize_t i, j
    if cl == 2:
        for j in range(1, m + 1):
            xp[0, j] = xp[n, j]
            xp[n + 1, j] = xp[1, j]
    else:
        if cl == 0:
            for j in range(1, m + 1):
                xp[0, j] = xp[1, j]
        else:
            for j in range(1, m + 1):
                xp[0, j] = -xp[1, j]
        if cr == 0:
            for j in range(1, m + 1):
                xp[n + 1, j] = xp[n, j]
        else:
            for j in range(1, m + 1):
                xp[n + 1, j] = -xp[n, j]
    if cb == 2:
        for i in range(1, n + 1):
            xp[i, 0] = xp[i, m]
            xp[i, m + 1] = xp[i, 1]
    else:
        if cb == 0:
            for i in range(1, n + 1):
                xp[i, 0] = xp[i, 1]
        else:
            for i in range(1, n + 1):
                xp[i, 0] = -xp[i, 1]
        if ct == 0:
            for i in range(1, n + 1):
                xp[i, m + 1] = xp[i, m]
        else:
            for i in range(1, n + 1):
                xp[i, m + 1] = -xp[i, m]
    xp[0, 0] = xp[1, 1]
    xp[0, m + 1] = xp[1, m]
    xp[n + 1, 0] = xp[n, 1]
    xp[n + 1, m + 1] = xp[n, m]


def helmholtz_residual(double[:, ::1] xp, double[:, ::1] rhs, double a,
                       double b, double[:, ::1] out):
    """out = rhs - (a x - b (5-point sum - 4x)) on the padded interior;
    returns max |out|."""
    cdef Py_ssize_t n = rhs.shape[0]
    cdef Py_ssize_t m = rhs.shape[1]
    cdef Py_ssize_t i, j
    cdef double r, worst = 0.0
    for i in range(n):
        for j in range(m):
            r = rhs[i, j] - a * xp[i + 1, j + 1] + b * (
                xp[i, j + 1] + xp[i + 2, j + 1] + xp[i + 1, j]
                + xp[i + 1, j + 2] - 4.0 * xp[i + 1, j + 1]
            )
            out[i, j] = r
            if r > worst:
                worst = r
            elif -r > worst:
                worst = -r
    return worst
