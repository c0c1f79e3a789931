"""Single fluid step: Crank-Nicolson viscosity, AB2 convection, projection.

The time-dependent Stokes system is split: a Helmholtz solve produces the
intermediate velocity with the viscous term treated半 implicitly, and an
incremental pressure projection enforces the divergence constraint

    rho (u* - u^n)/dt + rho N* = -grad p^n + mu/2 lap(u* + u^n) + f
    lap(phi) = rho/dt div(u*),   u^{n+1} = u* - dt/rho grad(phi),
    p^{n+1} = p^n + phi.

Pressure-increment boundary codes follow from the velocity BCs (Neumann at
prescribed-velocity sides, Dirichlet 0 at traction sides, periodic wrap);
the same ghost-filled discrete Laplacian is used in the multigrid hierarchy
and in the correction, so the post-projection divergence equals the Poisson
residual.
"""

from __future__ import annotations

import numpy as np

from .grid import (
    BoundarySpec,
    FlowState,
    MACGrid,
    NormalVelocityTangentialTraction,
    VelocityDirichlet,
    _fill_component_ghosts,
    apply_fixed_faces,
    divergence,
    fill_ghosts,
)
from .poisson import PoissonSolver, SolverError, helmholtz_solve

__all__ = ["StokesSolver", "SolverError"]


def _free_masks(grid: MACGrid, bc: BoundarySpec):
    """Faces updated by the momentum solve (prescribed normals are pinned)."""
    free_u = np.ones(grid.u_shape(), dtype=bool)
    free_v = np.ones(grid.v_shape(), dtype=bool)
    for side, arr, idx in (("left", free_u, 0), ("right", free_u, grid.nx)):
        b = bc[side]
        if isinstance(b, (VelocityDirichlet, NormalVelocityTangentialTraction)):
            arr[idx, :] = False
    for side, arr, idx in (("bottom", free_v, 0), ("top", free_v, grid.ny)):
        b = bc[side]
        if isinstance(b, (VelocityDirichlet, NormalVelocityTangentialTraction)):
            arr[:, idx] = False
    if bc.periodic_x():
        free_u[grid.nx, :] = False  # duplicate of face 0
    if bc.periodic_y():
        free_v[:, grid.ny] = False
    return free_u, free_v


class StokesSolver:
    """Reusable per-grid solver state (multigrid hierarchy, face masks)."""

    def __init__(self, grid: MACGrid, bc: BoundarySpec, tol: float = 1e-9):
        self.grid = grid
        self.bc = bc
        self.tol = tol
        codes = bc.phi_codes()
        self.poisson = PoissonSolver(grid.nx, grid.ny, grid.h,
                                     (codes["left"], codes["right"],
                                      codes["bottom"], codes["top"]))
        self.free_u, self.free_v = _free_masks(grid, bc)
        self._phi_codes = (codes["left"], codes["right"], codes["bottom"],
                           codes["top"])
        self._buf_u = np.zeros((grid.nx + 3, grid.ny + 2))
        self._buf_v = np.zeros((grid.nx + 2, grid.ny + 3))
        self._phi_prev = None

    # -- discrete gradient of the pressure increment ------------------------

    def _phi_gradients(self, phi):
        grid = self.grid
        from .poisson import _fill_phi_ghosts

        pp = np.zeros((grid.nx + 2, grid.ny + 2))
        pp[1:-1, 1:-1] = phi
        _fill_phi_ghosts(pp, self._phi_codes)
        gx = (pp[1:, 1:-1] - pp[:-1, 1:-1]) / grid.h    # (nx+1, ny)
        gy = (pp[1:-1, 1:] - pp[1:-1, :-1]) / grid.h    # (nx, ny+1)
        return gx, gy

    def project(self, state: FlowState) -> float:
        """Make the velocity discretely divergence-free; returns max |div|."""
        grid, bc = self.grid, self.bc
        div = divergence(state, grid)
        phi = self.poisson.solve(div * grid.rho, tol=self.tol)
        gx, gy = self._phi_gradients(phi)
        state.u[self.free_u] -= gx[self.free_u] / grid.rho
        state.v[self.free_v] -= gy[self.free_v] / grid.rho
        if bc.periodic_x():
            state.u[grid.nx, :] = state.u[0, :]
        if bc.periodic_y():
            state.v[:, grid.ny] = state.v[:, 0]
        return float(np.max(np.abs(divergence(state, grid))))

    # -- one step ------------------------------------------------------------

    def step(self, state: FlowState, N_star, f, dt: float) -> FlowState:
        """Advance to t + dt given the extrapolated convective term and the
        face force field f = (fu, fv); returns a new FlowState."""
        grid, bc = self.grid, self.bc
        rho, mu, h = grid.rho, grid.mu, grid.h
        t_new = state.t + dt
        Nu, Nv = N_star
        fu, fv = f

        up, vp, pp = fill_ghosts(state, grid, bc, t=state.t, width=1)
        lap_u = (up[:-2, 1:-1] + up[2:, 1:-1] + up[1:-1, :-2] + up[1:-1, 2:]
                 - 4.0 * up[1:-1, 1:-1]) / h**2
        lap_v = (vp[:-2, 1:-1] + vp[2:, 1:-1] + vp[1:-1, :-2] + vp[1:-1, 2:]
                 - 4.0 * vp[1:-1, 1:-1]) / h**2
        gpx = (pp[1:, 1:-1] - pp[:-1, 1:-1]) / h
        gpy = (pp[1:-1, 1:] - pp[1:-1, :-1]) / h

        rhs_u = (rho / dt) * state.u - rho * Nu - gpx + 0.5 * mu * lap_u + fu
        rhs_v = (rho / dt) * state.v - rho * Nv - gpy + 0.5 * mu * lap_v + fv

        # intermediate state holds the new-time boundary values
        new = state.copy()
        new.t = t_new
        apply_fixed_faces(new, grid, bc, t_new)

        a = rho / dt
        b = 0.5 * mu / h**2

        def gf_u(x):
            if bc.periodic_x():
                x[grid.nx, :] = x[0, :]
            return _fill_component_ghosts(x, grid, bc, t_new, 1, "u",
                                          out=self._buf_u)

        def gf_v(x):
            if bc.periodic_y():
                x[:, grid.ny] = x[:, 0]
            return _fill_component_ghosts(x, grid, bc, t_new, 1, "v",
                                          out=self._buf_v)

        new.u = helmholtz_solve(a, b, rhs_u, self.free_u, gf_u, new.u,
                                tol=self.tol)
        new.v = helmholtz_solve(a, b, rhs_v, self.free_v, gf_v, new.v,
                                tol=self.tol)
        if bc.periodic_x():
            new.u[grid.nx, :] = new.u[0, :]
        if bc.periodic_y():
            new.v[:, grid.ny] = new.v[:, 0]

        # projection (warm-started from the previous increment)
        div_star = divergence(new, grid)
        phi = self.poisson.solve((rho / dt) * div_star, tol=self.tol,
                                 x0=self._phi_prev)
        self._phi_prev = phi
        gx, gy = self._phi_gradients(phi)
        new.u[self.free_u] -= (dt / rho) * gx[self.free_u]
        new.v[self.free_v] -= (dt / rho) * gy[self.free_v]
        if bc.periodic_x():
            new.u[grid.nx, :] = new.u[0, :]
        if bc.periodic_y():
            new.v[:, grid.ny] = new.v[:, 0]
        new.p = state.p + phi
        if self.poisson.singular:
            new.p = new.p - new.p.mean()

        if not (np.all(np.isfinite(new.u)) and np.all(np.isfinite(new.v))
                and np.all(np.isfinite(new.p))):
            raise SolverError(f"non-finite state after step to t={t_new:g}")
        return new
