"""Cell-centered Poisson and face Helmholtz solvers on the uniform grid.

The pressure Poisson problem is solved with geometric multigrid V-cycles
(red-black Gauss-Seidel smoothing, full-weighting restriction, bilinear
prolongation) iterated to a relative residual of 1e-9; a V-cycle
preconditioned conjugate-gradient fallback engages if plain cycling stalls.
Boundary conditions per side are homogeneous Neumann (0), homogeneous
Dirichlet (1), or periodic (2) and are realized through ghost layers at every
level.  The viscous Helmholtz solves are strongly diagonally dominant for the
regimes run here and use damped-Jacobi fixed-point iteration with full
(inhomogeneous) ghost fills each sweep.
"""

from __future__ import annotations

import numpy as np

from .. import _core

__all__ = ["PoissonSolver", "SolverError"]


class SolverError(RuntimeError):
    pass


def _fill_phi_ghosts(xp, codes):
    """Populate the 1-wide ghost ring of a padded array, homogeneous BCs."""
    _core.fill_phi_ghosts(xp, *codes)


class _Level:
    def __init__(self, nx, ny, h, codes):
        self.nx, self.ny, self.h, self.codes = nx, ny, h, codes
        self.xp = np.zeros((nx + 2, ny + 2))
        self.rhs = np.zeros((nx, ny))
        self.res = np.zeros((nx, ny))


class PoissonSolver:
    """Reusable multigrid hierarchy for one grid shape and BC set."""

    def __init__(self, nx, ny, h, codes, singular=None):
        self.codes = tuple(codes)
        # singular problem: no Dirichlet side anchors the constant mode
        self.singular = (singular if singular is not None
                         else all(c != 1 for c in self.codes))
        self.levels = []
        while True:
            self.levels.append(_Level(nx, ny, h, self.codes))
            if nx % 2 or ny % 2 or min(nx, ny) <= 3:
                break
            nx, ny, h = nx // 2, ny // 2, 2.0 * h

    # -- level operations ---------------------------------------------------

    def _smooth(self, lev: _Level, colors):
        h2 = lev.h * lev.h
        for c in colors:
            _core.fill_phi_ghosts(lev.xp, *lev.codes)
            _core.rbgs_sweep(lev.xp, lev.rhs, h2, c)

    def _residual(self, lev: _Level):
        _core.fill_phi_ghosts(lev.xp, *lev.codes)
        _core.laplace_residual(lev.xp, lev.rhs, lev.h * lev.h, lev.res)

    def _vcycle(self, k: int):
        lev = self.levels[k]
        if k == len(self.levels) - 1:
            for _ in range(25):
                self._smooth(lev, (0, 1))
            return
        self._smooth(lev, (0, 1))
        self._smooth(lev, (0, 1))
        self._residual(lev)
        coarse = self.levels[k + 1]
        # full weighting: average of the four children
        r = lev.res
        coarse.rhs[...] = 0.25 * (r[0::2, 0::2] + r[1::2, 0::2]
                                  + r[0::2, 1::2] + r[1::2, 1::2])
        coarse.xp[...] = 0.0
        self._vcycle(k + 1)
        # bilinear prolongation via the ghost-padded coarse solution
        _fill_phi_ghosts(coarse.xp, coarse.codes)
        cx = coarse.xp
        nxc, nyc = coarse.nx, coarse.ny
        c = cx[1:nxc + 1, 1:nyc + 1]
        w_, e_ = cx[0:nxc, 1:nyc + 1], cx[2:nxc + 2, 1:nyc + 1]
        s_, n_ = cx[1:nxc + 1, 0:nyc], cx[1:nxc + 1, 2:nyc + 2]
        sw, se = cx[0:nxc, 0:nyc], cx[2:nxc + 2, 0:nyc]
        nw, ne = cx[0:nxc, 2:nyc + 2], cx[2:nxc + 2, 2:nyc + 2]
        fine = lev.xp[1:lev.nx + 1, 1:lev.ny + 1]
        fine[0::2, 0::2] += (9 * c + 3 * w_ + 3 * s_ + sw) / 16.0
        fine[1::2, 0::2] += (9 * c + 3 * e_ + 3 * s_ + se) / 16.0
        fine[0::2, 1::2] += (9 * c + 3 * w_ + 3 * n_ + nw) / 16.0
        fine[1::2, 1::2] += (9 * c + 3 * e_ + 3 * n_ + ne) / 16.0
        self._smooth(lev, (1, 0))
        self._smooth(lev, (1, 0))

    # -- public interface ----------------------------------------------------

    def _project(self, arr):
        arr -= arr.mean()

    def residual_norm(self, x, rhs):
        lev = self.levels[0]
        lev.xp[1:-1, 1:-1] = x
        lev.rhs[...] = rhs
        self._residual(lev)
        return float(np.max(np.abs(lev.res)))

    def solve(self, rhs, tol=1e-9, max_cycles=60, x0=None):
        """Solve lap(x) = rhs to max-norm relative residual <= tol."""
        lev = self.levels[0]
        rhs = np.array(rhs, dtype=float)
        if self.singular:
            rhs -= rhs.mean()
        scale = float(np.max(np.abs(rhs)))
        if scale == 0.0:
            return np.zeros_like(rhs) if x0 is None else x0.copy()
        lev.rhs[...] = rhs
        lev.xp[...] = 0.0
        if x0 is not None:
            lev.xp[1:-1, 1:-1] = x0

        self._last_r = np.inf
        target = tol * scale
        for cycle in range(max_cycles):
            self._vcycle(0)
            if self.singular:
                self._project(lev.xp[1:-1, 1:-1])
            self._residual(lev)
            r = float(np.max(np.abs(lev.res)))
            if r <= target:
                return lev.xp[1:-1, 1:-1].copy()
            if cycle >= 7 and r > 0.7 * getattr(self, "_last_r", np.inf):
                break  # stalled; hand over to the CG fallback
            self._last_r = r
        return self._cg_fallback(rhs, target, lev.xp[1:-1, 1:-1].copy())

    def _apply(self, x, out):
        lev = self.levels[0]
        lev.xp[1:-1, 1:-1] = x
        _fill_phi_ghosts(lev.xp, lev.codes)
        _core.laplace_apply(lev.xp, lev.h * lev.h, out)

    def _precondition(self, r):
        lev = self.levels[0]
        saved = lev.rhs.copy()
        lev.rhs[...] = r
        lev.xp[...] = 0.0
        self._vcycle(0)
        z = lev.xp[1:-1, 1:-1].copy()
        lev.rhs[...] = saved
        if self.singular:
            z -= z.mean()
        return z

    def _cg_fallback(self, rhs, target, x):
        out = np.empty_like(rhs)
        self._apply(x, out)
        r = rhs - out
        z = self._precondition(r)
        p = z.copy()
        rz = float(np.sum(r * z))
        for _ in range(400):
            if float(np.max(np.abs(r))) <= target:
                return x
            self._apply(p, out)
            alpha = rz / float(np.sum(p * out))
            x += alpha * p
            r -= alpha * out
            if self.singular:
                x -= x.mean()
            z = self._precondition(r)
            rz_new = float(np.sum(r * z))
            p = z + (rz_new / rz) * p
            rz = rz_new
        raise SolverError(
            f"pressure Poisson solve stalled: residual {np.max(np.abs(r)):.3e} "
            f"above target {target:.3e}"
        )


def helmholtz_solve(a, b, rhs, free_mask, ghost_fill, x0, tol=1e-9,
                    max_iters=600):
    """Solve a x - b (5-point sum - 4 x) = rhs on free faces (Jacobi iteration).

    b carries the mu/(2 h^2) scaling.  ghost_fill(x) -> padded array with all
    (inhomogeneous) BCs applied; fixed faces of x are never modified.
    Diagonal dominance a >> 4 b holds in the intended regimes, so convergence
    is fast; a SolverError reports the residual otherwise.
    """
    x = x0.copy()
    rhs = np.ascontiguousarray(rhs)
    scale = float(np.max(np.abs(rhs))) or 1.0
    diag = a + 4.0 * b
    res = np.zeros_like(rhs)
    fixed = ~free_mask
    any_fixed = bool(fixed.any())
    worst = np.inf
    for _ in range(max_iters):
        xp = ghost_fill(x)
        worst = _core.helmholtz_residual(xp, rhs, a, b, res)
        if any_fixed:
            res[fixed] = 0.0
            worst = float(np.max(np.abs(res)))
        if worst <= tol * scale:
            return x
        x += res / diag  # fixed entries carry zero residual
    raise SolverError(
        f"Helmholtz solve did not reach tol={tol:g} in {max_iters} iterations "
        f"(residual {worst:.3e}, scale {scale:.3e})"
    )
