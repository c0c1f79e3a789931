"""Uniform staggered (MAC) grid, boundary conditions, and ghost filling.

Layout for an nx x ny cell grid with square cells of size h:
    u: (nx+1, ny) on x-faces at (i h, (j+1/2) h)
    v: (nx, ny+1) on y-faces at ((i+1/2) h, j h)
    p: (nx, ny)   at centers  ((i+1/2) h, (j+1/2) h)

Four boundary condition types per side: prescribed velocity (no-slip being
the zero case), normal traction with prescribed tangential velocity (open or
pressure-driven boundaries), normal velocity with prescribed tangential
traction (free-slip walls), and periodic.  Traction values are the normal
normal-stress component sigma_nn = -p + 2 mu du_n/dn; the pressure boundary
value realizing it uses a one-sided second-order normal-derivative
reconstruction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "MACGrid",
    "FlowState",
    "BoundarySpec",
    "VelocityDirichlet",
    "NoSlip",
    "NormalTractionTangentialVelocity",
    "NormalVelocityTangentialTraction",
    "Periodic",
    "SIDES",
    "fill_ghosts",
    "apply_fixed_faces",
    "divergence",
    "face_coords",
]

SIDES = ("left", "right", "bottom", "top")


def _as_fn(value) -> Callable:
    if callable(value):
        return value
    const = float(value)
    return lambda x, y, t: np.full(np.broadcast(x, y).shape, const)


@dataclass
class VelocityDirichlet:
    u: Callable | float = 0.0
    v: Callable | float = 0.0

    def __post_init__(self):
        self.u = _as_fn(self.u)
        self.v = _as_fn(self.v)


def NoSlip() -> VelocityDirichlet:
    return VelocityDirichlet(0.0, 0.0)


@dataclass
class NormalTractionTangentialVelocity:
    """sigma_nn prescribed (Dirichlet pressure side); tangential velocity set."""

    traction: Callable | float = 0.0
    tangential: Callable | float = 0.0

    def __post_init__(self):
        self.traction = _as_fn(self.traction)
        self.tangential = _as_fn(self.tangential)


@dataclass
class NormalVelocityTangentialTraction:
    """Normal velocity prescribed; tangential shear stress set (0 = free slip)."""

    normal: Callable | float = 0.0
    traction: Callable | float = 0.0

    def __post_init__(self):
        self.normal = _as_fn(self.normal)
        self.traction = _as_fn(self.traction)


class Periodic:
    pass


@dataclass
class BoundarySpec:
    left: object = field(default_factory=NoSlip)
    right: object = field(default_factory=NoSlip)
    bottom: object = field(default_factory=NoSlip)
    top: object = field(default_factory=NoSlip)

    def __post_init__(self):
        for a, b in (("left", "right"), ("bottom", "top")):
            pa = isinstance(getattr(self, a), Periodic)
            pb = isinstance(getattr(self, b), Periodic)
            if pa != pb:
                raise ValueError(f"periodic sides must pair: {a}/{b}")

    def __getitem__(self, side):
        return getattr(self, side)

    def periodic_x(self) -> bool:
        return isinstance(self.left, Periodic)

    def periodic_y(self) -> bool:
        return isinstance(self.bottom, Periodic)

    def phi_codes(self):
        """Pressure-increment BC per side: 0 Neumann, 1 Dirichlet0, 2 periodic."""
        codes = {}
        for side in SIDES:
            bc = self[side]
            if isinstance(bc, Periodic):
                codes[side] = 2
            elif isinstance(bc, NormalTractionTangentialVelocity):
                codes[side] = 1
            else:
                codes[side] = 0
        return codes


@dataclass
class MACGrid:
    nx: int
    ny: int
    h: float
    x0: float = 0.0
    y0: float = 0.0
    rho: float = 1.0
    mu: float = 1.0

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2x2 cells")
        if self.h <= 0.0:
            raise ValueError("cell size must be positive")

    @classmethod
    def from_extent(cls, Lx, Ly, h, **kw):
        nx, ny = round(Lx / h), round(Ly / h)
        if abs(nx * h - Lx) > 1e-9 * Lx or abs(ny * h - Ly) > 1e-9 * Ly:
            raise ValueError("extents must be integer multiples of h (square cells)")
        return cls(nx, ny, h, **kw)

    @property
    def extent(self):
        return self.nx * self.h, self.ny * self.h

    def u_shape(self):
        return (self.nx + 1, self.ny)

    def v_shape(self):
        return (self.nx, self.ny + 1)

    def p_shape(self):
        return (self.nx, self.ny)


def face_coords(grid: MACGrid, component: str):
    """1D coordinate arrays (x, y) of the requested face or center family."""
    if component == "u":
        x = grid.x0 + np.arange(grid.nx + 1) * grid.h
        y = grid.y0 + (np.arange(grid.ny) + 0.5) * grid.h
    elif component == "v":
        x = grid.x0 + (np.arange(grid.nx) + 0.5) * grid.h
        y = grid.y0 + np.arange(grid.ny + 1) * grid.h
    elif component == "p":
        x = grid.x0 + (np.arange(grid.nx) + 0.5) * grid.h
        y = grid.y0 + (np.arange(grid.ny) + 0.5) * grid.h
    else:
        raise ValueError(component)
    return x, y


@dataclass
class FlowState:
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    t: float = 0.0
    prev_convective: tuple | None = None  # (Nu, Nv) at the previous step

    @classmethod
    def zeros(cls, grid: MACGrid, t: float = 0.0) -> "FlowState":
        return cls(np.zeros(grid.u_shape()), np.zeros(grid.v_shape()),
                   np.zeros(grid.p_shape()), t)

    def copy(self) -> "FlowState":
        prev = None
        if self.prev_convective is not None:
            prev = (self.prev_convective[0].copy(), self.prev_convective[1].copy())
        return FlowState(self.u.copy(), self.v.copy(), self.p.copy(), self.t, prev)


def apply_fixed_faces(state: FlowState, grid: MACGrid, bc: BoundarySpec,
                      t: float) -> None:
    """Impose prescribed normal velocities on boundary-coincident faces."""
    xu, yu = face_coords(grid, "u")
    xv, yv = face_coords(grid, "v")
    for side, arr, coord, idx in (
        ("left", state.u, yu, 0), ("right", state.u, yu, grid.nx),
        ("bottom", state.v, xv, 0), ("top", state.v, xv, grid.ny),
    ):
        bc_side = bc[side]
        vertical = side in ("left", "right")
        xb = grid.x0 if side == "left" else grid.x0 + grid.nx * grid.h
        yb = grid.y0 if side == "bottom" else grid.y0 + grid.ny * grid.h
        if isinstance(bc_side, VelocityDirichlet):
            fn = bc_side.u if vertical else bc_side.v
            vals = fn(np.full_like(coord, xb), coord, t) if vertical \
                else fn(coord, np.full_like(coord, yb), t)
            if vertical:
                arr[idx, :] = vals
            else:
                arr[:, idx] = vals
        elif isinstance(bc_side, NormalVelocityTangentialTraction):
            vals = bc_side.normal(np.full_like(coord, xb), coord, t) if vertical \
                else bc_side.normal(coord, np.full_like(coord, yb), t)
            if vertical:
                arr[idx, :] = vals
            else:
                arr[:, idx] = vals
    if bc.periodic_x():
        state.u[grid.nx, :] = state.u[0, :]
    if bc.periodic_y():
        state.v[:, grid.ny] = state.v[:, 0]


def _pad(arr, w, out=None):
    if out is None:
        out = np.zeros((arr.shape[0] + 2 * w, arr.shape[1] + 2 * w))
    out[w:w + arr.shape[0], w:w + arr.shape[1]] = arr
    return out


def _tangential_ghost(b, q0, q1, k):
    """Quadratic extrapolant through the wall value b and the first two
    interior tangential faces (at h/2, 3h/2), evaluated at -(2k-1) h/2.

    Second-order pointwise; keeps curved profiles (e.g. Poiseuille) exact
    steady states of the discrete operator.
    """
    y = -(2 * k - 1) / 2.0
    lb = (y - 0.5) * (y - 1.5) / 0.75
    l0 = y * (y - 1.5) / -0.5
    l1 = y * (y - 0.5) / 1.5
    return lb * b + l0 * q0 + l1 * q1


def _fill_component_ghosts(arr, grid, bc, t, w, component, out=None):
    """Pad a face array and populate w ghost layers per side."""
    out = _pad(arr, w, out)
    nx, ny, h = grid.nx, grid.ny, grid.h
    ni, nj = arr.shape
    xu, yu = face_coords(grid, component)

    # ----- x direction (left/right): normal for u, tangential for v -----
    if bc.periodic_x():
        if component == "u":
            # u[0] == u[nx]; wrap skipping the duplicate boundary face
            for k in range(1, w + 1):
                out[w - k, w:w + nj] = arr[ni - 1 - k, :]
                out[w + ni - 1 + k, w:w + nj] = arr[k, :]
        else:
            for k in range(1, w + 1):
                out[w - k, w:w + nj] = arr[ni - k, :]
                out[w + ni - 1 + k, w:w + nj] = arr[k - 1, :]
    else:
        for side, edge in (("left", 0), ("right", 1)):
            bc_side = bc[side]
            xb = grid.x0 if side == "left" else grid.x0 + nx * h
            if component == "u":
                # boundary-coincident faces
                if isinstance(bc_side, NormalTractionTangentialVelocity):
                    # open boundary: linear extrapolation of the normal velocity
                    for k in range(1, w + 1):
                        if side == "left":
                            out[w - k, w:w + nj] = (k + 1) * arr[0, :] - k * arr[1, :]
                        else:
                            out[w + ni - 1 + k, w:w + nj] = \
                                (k + 1) * arr[ni - 1, :] - k * arr[ni - 2, :]
                else:
                    for k in range(1, w + 1):
                        if side == "left":
                            out[w - k, w:w + nj] = 2.0 * arr[0, :] - arr[k, :]
                        else:
                            out[w + ni - 1 + k, w:w + nj] = \
                                2.0 * arr[ni - 1, :] - arr[ni - 1 - k, :]
            else:
                # v is tangential to left/right
                yv = yu
                if isinstance(bc_side, (VelocityDirichlet,
                                        NormalTractionTangentialVelocity)):
                    fn = (bc_side.v if isinstance(bc_side, VelocityDirichlet)
                          else bc_side.tangential)
                    vb = fn(np.full_like(yv, xb), yv, t)
                    for k in range(1, w + 1):
                        if side == "left":
                            out[w - k, w:w + nj] = _tangential_ghost(
                                vb, arr[0, :], arr[1, :], k)
                        else:
                            out[w + ni - 1 + k, w:w + nj] = _tangential_ghost(
                                vb, arr[ni - 1, :], arr[ni - 2, :], k)
                elif isinstance(bc_side, NormalVelocityTangentialTraction):
                    # mu dv/dx = g_t; ghost offset over distance (2k-1) h
                    gt = bc_side.traction(np.full_like(yv, xb), yv, t)
                    for k in range(1, w + 1):
                        if side == "left":
                            out[w - k, w:w + nj] = arr[k - 1, :] - (2 * k - 1) * h * gt / grid.mu
                        else:
                            out[w + ni - 1 + k, w:w + nj] = arr[ni - k, :] + (2 * k - 1) * h * gt / grid.mu

    # ----- y direction (bottom/top): tangential for u, normal for v -----
    if bc.periodic_y():
        if component == "v":
            for k in range(1, w + 1):
                out[w:w + ni, w - k] = arr[:, nj - 1 - k]
                out[w:w + ni, w + nj - 1 + k] = arr[:, k]
        else:
            for k in range(1, w + 1):
                out[w:w + ni, w - k] = arr[:, nj - k]
                out[w:w + ni, w + nj - 1 + k] = arr[:, k - 1]
    else:
        for side in ("bottom", "top"):
            bc_side = bc[side]
            yb = grid.y0 if side == "bottom" else grid.y0 + ny * h
            if component == "v":
                if isinstance(bc_side, NormalTractionTangentialVelocity):
                    for k in range(1, w + 1):
                        if side == "bottom":
                            out[w:w + ni, w - k] = (k + 1) * arr[:, 0] - k * arr[:, 1]
                        else:
                            out[w:w + ni, w + nj - 1 + k] = \
                                (k + 1) * arr[:, nj - 1] - k * arr[:, nj - 2]
                else:
                    for k in range(1, w + 1):
                        if side == "bottom":
                            out[w:w + ni, w - k] = 2.0 * arr[:, 0] - arr[:, k]
                        else:
                            out[w:w + ni, w + nj - 1 + k] = \
                                2.0 * arr[:, nj - 1] - arr[:, nj - 1 - k]
            else:
                xs = xu
                if isinstance(bc_side, (VelocityDirichlet,
                                        NormalTractionTangentialVelocity)):
                    fn = (bc_side.u if isinstance(bc_side, VelocityDirichlet)
                          else bc_side.tangential)
                    ub = fn(xs, np.full_like(xs, yb), t)
                    for k in range(1, w + 1):
                        if side == "bottom":
                            out[w:w + ni, w - k] = _tangential_ghost(
                                ub, arr[:, 0], arr[:, 1], k)
                        else:
                            out[w:w + ni, w + nj - 1 + k] = _tangential_ghost(
                                ub, arr[:, nj - 1], arr[:, nj - 2], k)
                elif isinstance(bc_side, NormalVelocityTangentialTraction):
                    gt = bc_side.traction(xs, np.full_like(xs, yb), t)
                    for k in range(1, w + 1):
                        if side == "bottom":
                            out[w:w + ni, w - k] = arr[:, k - 1] - (2 * k - 1) * h * gt / grid.mu
                        else:
                            out[w:w + ni, w + nj - 1 + k] = arr[:, nj - k] + (2 * k - 1) * h * gt / grid.mu
    return out


def boundary_pressure(state: FlowState, grid: MACGrid, bc: BoundarySpec,
                      t: float, side: str) -> np.ndarray:
    """p at a traction boundary from sigma_nn = -p + 2 mu du_n/dn = g."""
    bc_side = bc[side]
    h, mu = grid.h, grid.mu
    u, v = state.u, state.v
    nx, ny = grid.nx, grid.ny
    if side == "left":
        x, y = face_coords(grid, "u")
        dun = (-3.0 * u[0, :] + 4.0 * u[1, :] - u[2, :]) / (2.0 * h)
        g = bc_side.traction(np.full_like(y, grid.x0), y, t)
    elif side == "right":
        x, y = face_coords(grid, "u")
        dun = (3.0 * u[nx, :] - 4.0 * u[nx - 1, :] + u[nx - 2, :]) / (2.0 * h)
        g = bc_side.traction(np.full_like(y, grid.x0 + nx * h), y, t)
    elif side == "bottom":
        x, y = face_coords(grid, "v")
        dun = (-3.0 * v[:, 0] + 4.0 * v[:, 1] - v[:, 2]) / (2.0 * h)
        g = bc_side.traction(x, np.full_like(x, grid.y0), t)
    else:
        x, y = face_coords(grid, "v")
        dun = (3.0 * v[:, ny] - 4.0 * v[:, ny - 1] + v[:, ny - 2]) / (2.0 * h)
        g = bc_side.traction(x, np.full_like(x, grid.y0 + ny * h), t)
    return 2.0 * mu * dun - g


def _fill_pressure_ghosts(state, grid, bc, t, w):
    p = state.p
    out = _pad(p, w)
    nx, ny = grid.nx, grid.ny

    if bc.periodic_x():
        for k in range(1, w + 1):
            out[w - k, w:w + ny] = p[nx - k, :]
            out[w + nx - 1 + k, w:w + ny] = p[k - 1, :]
    else:
        for side in ("left", "right"):
            if isinstance(bc[side], NormalTractionTangentialVelocity):
                # u-face y lattice coincides with the p lattice, so the
                # boundary pressure lines up row for row
                pb = boundary_pressure(state, grid, bc, t, side)
                for k in range(1, w + 1):
                    if side == "left":
                        out[w - k, w:w + ny] = 2.0 * pb - p[k - 1, :]
                    else:
                        out[w + nx - 1 + k, w:w + ny] = 2.0 * pb - p[nx - k, :]
            else:
                for k in range(1, w + 1):
                    if side == "left":
                        out[w - k, w:w + ny] = p[k - 1, :]
                    else:
                        out[w + nx - 1 + k, w:w + ny] = p[nx - k, :]

    if bc.periodic_y():
        for k in range(1, w + 1):
            out[w:w + nx, w - k] = p[:, ny - k]
            out[w:w + nx, w + ny - 1 + k] = p[:, k - 1]
    else:
        for side in ("bottom", "top"):
            if isinstance(bc[side], NormalTractionTangentialVelocity):
                pb = boundary_pressure(state, grid, bc, t, side)
                for k in range(1, w + 1):
                    if side == "bottom":
                        out[w:w + nx, w - k] = 2.0 * pb - p[:, k - 1]
                    else:
                        out[w:w + nx, w + ny - 1 + k] = 2.0 * pb - p[:, ny - k]
            else:
                for k in range(1, w + 1):
                    if side == "bottom":
                        out[w:w + nx, w - k] = p[:, k - 1]
                    else:
                        out[w:w + nx, w + ny - 1 + k] = p[:, ny - k]
    return out


def fill_ghosts(state: FlowState, grid: MACGrid, bc: BoundarySpec,
                t: float | None = None, width: int = 1):
    """Ghost-padded (u, v, p) arrays implementing the boundary conditions."""
    if t is None:
        t = state.t
    up = _fill_component_ghosts(state.u, grid, bc, t, width, "u")
    vp = _fill_component_ghosts(state.v, grid, bc, t, width, "v")
    pp = _fill_pressure_ghosts(state, grid, bc, t, width)
    return up, vp, pp


def divergence(state: FlowState, grid: MACGrid) -> np.ndarray:
    """Compact MAC divergence at cell centers."""
    h = grid.h
    return ((state.u[1:, :] - state.u[:-1, :])
            + (state.v[:, 1:] - state.v[:, :-1])) / h
