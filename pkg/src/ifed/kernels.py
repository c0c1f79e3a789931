"""Regularized delta-function kernels for Lagrangian-Eulerian coupling.

Nine one-dimensional basic kernels phi(r) are provided: the piecewise-linear
(two-point B-spline) kernel, the classical 3/4-point IB kernels, smoothed
5/6-point IB kernels, and B-splines with 3 to 6 points of support.  The
two-dimensional regularized delta is the tensor product
delta_h(x, y) = phi(x/h) phi(y/h) / h^2 evaluated on a face lattice.

The IB-family kernels are defined by algebraic conditions (moment sums,
even-odd splitting, sum of squares) rather than printed formulas; the 5- and
6-point members are evaluated by solving those conditions per lattice offset.
The solve reduces to stencil values affine in one free parameter with a
quadratic closure, so the implementation stores the reduced polynomial
coefficient tables (generated by scripts/derive_smoothed_kernels.py) and
takes the closure root that vanishes at the support edge.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelId",
    "KernelSpec",
    "DeltaWeights2D",
    "KERNEL_SPECS",
    "parse_kernel",
    "phi",
    "bspline_phi",
    "stencil_1d",
    "moment_sum",
    "even_odd_sums",
    "sum_of_squares",
    "delta_weights_2d",
]


class KernelId(enum.Enum):
    PIECEWISE_LINEAR = "pwl"
    IB3 = "ib3"
    IB4 = "ib4"
    IB5 = "ib5"
    IB6 = "ib6"
    BSPLINE3 = "bspline3"
    BSPLINE4 = "bspline4"
    BSPLINE5 = "bspline5"
    BSPLINE6 = "bspline6"


_ALIASES = {
    "pwl": KernelId.PIECEWISE_LINEAR,
    "bspline2": KernelId.PIECEWISE_LINEAR,
    "ib3": KernelId.IB3,
    "ib4": KernelId.IB4,
    "ib5": KernelId.IB5,
    "ib6": KernelId.IB6,
    "bspline3": KernelId.BSPLINE3,
    "bspline4": KernelId.BSPLINE4,
    "bspline5": KernelId.BSPLINE5,
    "bspline6": KernelId.BSPLINE6,
}


def parse_kernel(token: str) -> KernelId:
    """Map a config/CLI token (e.g. 'pwl', 'bspline2', 'ib4') to a KernelId."""
    try:
        return _ALIASES[token.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown kernel {token!r}; expected one of {sorted(_ALIASES)}"
        ) from None


# Second moments of the smoothed 5/6-point kernels and their sum-of-squares
# constants; exact values carry sqrt(69)/sqrt(29) terms.
_K5 = 38.0 / 60.0 - math.sqrt(69.0) / 60.0
_K6 = 59.0 / 60.0 - math.sqrt(29.0) / 20.0
_C5 = 2519.0 / 7200.0 + 37.0 * math.sqrt(69.0) / 7200.0
_C6 = 5431.0 / 19200.0 + 51.0 * math.sqrt(29.0) / 6400.0


@dataclass(frozen=True)
class KernelSpec:
    """Support width and which algebraic properties a kernel satisfies.

    ``second_moment``..``fifth_moment`` hold the constant value of the
    corresponding lattice moment sum when it is offset-independent, else None.
    """

    id: KernelId
    support: int
    satisfies_even_odd: bool
    second_moment: float | None = None
    third_moment: float | None = None
    fourth_moment: float | None = None
    fifth_moment: float | None = None
    sum_of_squares: float | None = None


KERNEL_SPECS = {
    KernelId.PIECEWISE_LINEAR: KernelSpec(KernelId.PIECEWISE_LINEAR, 2, False),
    KernelId.IB3: KernelSpec(KernelId.IB3, 3, False, sum_of_squares=0.5),
    KernelId.IB4: KernelSpec(KernelId.IB4, 4, True, sum_of_squares=0.375),
    KernelId.IB5: KernelSpec(
        KernelId.IB5, 5, False, second_moment=_K5, third_moment=0.0,
        sum_of_squares=_C5,
    ),
    KernelId.IB6: KernelSpec(
        KernelId.IB6, 6, True, second_moment=_K6, third_moment=0.0,
        sum_of_squares=_C6,
    ),
    # An n-point B-spline is the density of a sum of n uniform variables on
    # [-1/2, 1/2]; its moment sums are constant up to order n-1 and equal the
    # central moments n/12 (2nd) and 3(n/12)^2 - n/120 (4th).
    KernelId.BSPLINE3: KernelSpec(KernelId.BSPLINE3, 3, False, second_moment=0.25),
    KernelId.BSPLINE4: KernelSpec(
        KernelId.BSPLINE4, 4, False, second_moment=1.0 / 3.0, third_moment=0.0
    ),
    KernelId.BSPLINE5: KernelSpec(
        KernelId.BSPLINE5, 5, False, second_moment=5.0 / 12.0, third_moment=0.0,
        fourth_moment=3.0 * (5.0 / 12.0) ** 2 - 5.0 / 120.0,
    ),
    KernelId.BSPLINE6: KernelSpec(
        KernelId.BSPLINE6, 6, False, second_moment=0.5, third_moment=0.0,
        fourth_moment=3.0 * 0.25 - 6.0 / 120.0, fifth_moment=0.0,
    ),
}

_BSPLINE_DEGREE = {
    KernelId.PIECEWISE_LINEAR: 1,
    KernelId.BSPLINE3: 2,
    KernelId.BSPLINE4: 3,
    KernelId.BSPLINE5: 4,
    KernelId.BSPLINE6: 5,
}


# ---------------------------------------------------------------------------
# closed-form kernels
# ---------------------------------------------------------------------------

def bspline_phi(order: int, r):
    """Centered cardinal B-spline of polynomial degree ``order`` (0..5).

    Degree n has n+1 points of support; the closed form is the standard
    alternating sum of truncated powers and equals the convolution recursion
    of the piecewise-constant kernel with itself n times.
    """
    if not 0 <= order <= 5:
        raise ValueError(f"B-spline degree must be in 0..5, got {order}")
    x = np.asarray(r, dtype=float)
    if order == 0:
        out = np.where(np.abs(x) < 0.5, 1.0, 0.0)
        return out if out.ndim else float(out)
    half = 0.5 * (order + 1)
    out = np.zeros_like(x)
    for k in range(order + 2):
        arg = np.maximum(x + half - k, 0.0)
        out += (-1.0) ** k * math.comb(order + 1, k) * arg**order
    out /= math.factorial(order)
    out = np.where(np.abs(x) < half, np.maximum(out, 0.0), 0.0)
    return out if out.ndim else float(out)


def _phi_ib3(x):
    a = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(a)
    m1 = a <= 0.5
    m2 = (a > 0.5) & (a < 1.5)
    out[m1] = (1.0 + np.sqrt(np.maximum(1.0 - 3.0 * a[m1] ** 2, 0.0))) / 3.0
    a2 = a[m2]
    out[m2] = (5.0 - 3.0 * a2 - np.sqrt(np.maximum(1.0 - 3.0 * (1.0 - a2) ** 2, 0.0))) / 6.0
    return out


def _phi_ib4(x):
    a = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(a)
    m1 = a <= 1.0
    m2 = (a > 1.0) & (a < 2.0)
    a1 = a[m1]
    out[m1] = (3.0 - 2.0 * a1 + np.sqrt(np.maximum(1.0 + 4.0 * a1 - 4.0 * a1**2, 0.0))) / 8.0
    a2 = a[m2]
    out[m2] = (5.0 - 2.0 * a2 - np.sqrt(np.maximum(-7.0 + 12.0 * a2 - 4.0 * a2**2, 0.0))) / 8.0
    return out


# ---------------------------------------------------------------------------
# smoothed 5/6-point kernels via reduced condition tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SmoothedTable:
    support: int
    # stencil values y_m(r) = A_m(r) + B_m(r) * t on the canonical interval,
    # A rows are cubic polynomial coefficients (highest power first)
    A: np.ndarray
    B: np.ndarray
    # closure quadratic a t^2 + b(r) t + c(r) = 0; disc = b^2 - 4 a c
    a: float
    b: np.ndarray
    disc: np.ndarray


# 5-point: canonical offset r in [-1/2, 1/2), stencil m = -2..2
_TAB5 = _SmoothedTable(
    support=5,
    A=np.array([
        [-0.16666666666666666, 0.0, -0.08077813447568272, 0.0],
        [0.5, 0.5, -0.25766559657295185, 0.24744480114234937],
        [-0.5, -1.0, -0.24233440342704812, 0.5051103977153012],
        [0.16666666666666666, 0.5, 0.5807781344756827, 0.24744480114234937],
        [0.0, 0.0, 0.0, 0.0],
    ]),
    B=np.array([1.0, -4.0, 6.0, -4.0, 1.0]),
    a=70.0,
    b=np.array([-11.666666666666666, -20.0, -5.6544694132977895,
                2.102207954306025]),
    disc=np.array([-19.444444444444443, 0.0, 54.48510195567403, 0.0,
                   -39.12740369156567, 0.0, 8.606273705428984]),
)

# 6-point: canonical offset r in [0, 1), stencil m = -2..3
_TAB6 = _SmoothedTable(
    support=6,
    A=np.array([
        [-0.08333333333333333, 0.125, -0.0951854399108187, 0.026759386622076015],
        [0.16666666666666666, 0.0, -0.3096291201783626, 0.25],
        [0.0, -0.25, 0.0, 0.44648122675584795],
        [-0.16666666666666666, 0.0, 0.3096291201783626, 0.25],
        [0.08333333333333333, 0.125, 0.0951854399108187, 0.026759386622076015],
        [0.0, 0.0, 0.0, 0.0],
    ]),
    B=np.array([1.0, -3.0, 2.0, 2.0, -3.0, 1.0]),
    a=28.0,
    b=np.array([-2.3333333333333335, -1.5, 2.3348076824970763,
                1.1788873605350878]),
    disc=np.array([-2.3333333333333335, 7.0, 0.4196153649941528,
                   -12.505897396654973, 1.9146648326421054,
                   5.504950532352048, 1.389775408829386]),
)


def _smoothed_stencil(tab: _SmoothedTable, xi):
    """Stencil first index and all support values for lattice coordinates xi."""
    xi = np.asarray(xi, dtype=float)
    if tab.support % 2 == 0:
        n0 = np.floor(xi)
    else:
        n0 = np.floor(xi + 0.5)
    r = xi - n0
    rc = r[..., None]
    vals = ((tab.A[:, 0] * rc + tab.A[:, 1]) * rc + tab.A[:, 2]) * rc + tab.A[:, 3]
    b = np.polyval(tab.b, r)
    disc = np.maximum(np.polyval(tab.disc, r), 0.0)
    t = (np.sqrt(disc) - b) / (2.0 * tab.a)
    vals = vals + tab.B * t[..., None]
    first = n0.astype(np.int64) - 2
    return first, vals


def _phi_smoothed(tab: _SmoothedTable, x):
    x = np.asarray(x, dtype=float)
    first, vals = _smoothed_stencil(tab, x)
    col = -first
    valid = (col >= 0) & (col < tab.support)
    out = np.zeros_like(x)
    if out.ndim == 0:
        return float(vals[int(col)]) if valid else 0.0
    idx = np.nonzero(valid)
    out[idx] = vals[idx + (col[idx],)]
    return out


_PHI_FUNCS = {
    KernelId.PIECEWISE_LINEAR: lambda x: bspline_phi(1, x),
    KernelId.IB3: _phi_ib3,
    KernelId.IB4: _phi_ib4,
    KernelId.IB5: lambda x: _phi_smoothed(_TAB5, x),
    KernelId.IB6: lambda x: _phi_smoothed(_TAB6, x),
    KernelId.BSPLINE3: lambda x: bspline_phi(2, x),
    KernelId.BSPLINE4: lambda x: bspline_phi(3, x),
    KernelId.BSPLINE5: lambda x: bspline_phi(4, x),
    KernelId.BSPLINE6: lambda x: bspline_phi(5, x),
}


def phi(kernel: KernelId, r):
    """Evaluate the basic kernel function; zero outside support/2."""
    out = _PHI_FUNCS[kernel](np.asarray(r, dtype=float))
    if np.ndim(out) == 0:
        return float(out)
    return out


def stencil_1d(kernel: KernelId, xi):
    """Kernel weights on the integer lattice around coordinates ``xi``.

    Returns ``(first, w)`` where ``first`` is the lowest lattice index with
    (possibly) nonzero weight and ``w[..., k] = phi(xi - (first + k))`` for
    k in 0..support-1.  Everything outside this window is exactly zero.
    """
    xi = np.asarray(xi, dtype=float)
    if kernel is KernelId.IB5:
        return _smoothed_stencil(_TAB5, xi)
    if kernel is KernelId.IB6:
        return _smoothed_stencil(_TAB6, xi)
    s = KERNEL_SPECS[kernel].support
    if s % 2 == 0:
        first = np.floor(xi).astype(np.int64) - (s // 2 - 1)
    else:
        first = np.floor(xi + 0.5).astype(np.int64) - (s - 1) // 2
    offs = xi[..., None] - (first[..., None] + np.arange(s))
    return first, _PHI_FUNCS[kernel](offs)


def moment_sum(kernel: KernelId, order: int, r):
    """Lattice moment sum over the support: sum_j (r - j)^order phi(r - j)."""
    if order < 0:
        raise ValueError("moment order must be >= 0")
    r = np.asarray(r, dtype=float)
    first, w = stencil_1d(kernel, r)
    offs = r[..., None] - (first[..., None] + np.arange(w.shape[-1]))
    out = np.sum(offs**order * w, axis=-1)
    return float(out) if out.ndim == 0 else out


def even_odd_sums(kernel: KernelId, r):
    """Kernel mass on even and odd lattice points; both 1/2 iff even-odd holds."""
    r = np.asarray(r, dtype=float)
    first, w = stencil_1d(kernel, r)
    j = first[..., None] + np.arange(w.shape[-1])
    even = np.sum(np.where(j % 2 == 0, w, 0.0), axis=-1)
    odd = np.sum(np.where(j % 2 == 0, 0.0, w), axis=-1)
    if even.ndim == 0:
        return float(even), float(odd)
    return even, odd


def sum_of_squares(kernel: KernelId, r):
    """sum_j phi(r - j)^2; offset-independent only for the IB family."""
    r = np.asarray(r, dtype=float)
    _, w = stencil_1d(kernel, r)
    out = np.sum(w * w, axis=-1)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# tensor-product weights on a staggered-grid face lattice
# ---------------------------------------------------------------------------

@dataclass
class DeltaWeights2D:
    """support x support tensor-product delta weights anchored on a face lattice.

    ``stencil[a, b]`` multiplies the face at index ``(i0 + a, j0 + b)`` of the
    requested velocity-component array and already carries the 1/h^2 factor.
    """

    i0: int
    j0: int
    stencil: np.ndarray
    h: float


def _face_lattice_coords(point, grid, component: str):
    x, y = point
    xi = (x - grid.x0) / grid.h
    yi = (y - grid.y0) / grid.h
    if component == "u":
        return xi, yi - 0.5
    if component == "v":
        return xi - 0.5, yi
    raise ValueError(f"component must be 'u' or 'v', got {component!r}")


def delta_weights_2d(kernel: KernelId, point, grid, component: str) -> DeltaWeights2D:
    """Tensor-product regularized delta weights for one point on a face family.

    Raises ValueError for points outside the grid domain.  Near-boundary
    stencils may index faces outside the arrays; callers clip them (weights
    are reported unrenormalized).
    """
    x, y = point
    if not (grid.x0 <= x <= grid.x0 + grid.nx * grid.h
            and grid.y0 <= y <= grid.y0 + grid.ny * grid.h):
        raise ValueError(f"point {point} outside grid domain")
    xi, yi = _face_lattice_coords(point, grid, component)
    i0, wx = stencil_1d(kernel, np.asarray(xi))
    j0, wy = stencil_1d(kernel, np.asarray(yi))
    stencil = np.outer(wx, wy) / grid.h**2
    return DeltaWeights2D(int(i0), int(j0), stencil, grid.h)
