"""Lagrangian-Eulerian coupling: interaction points, spreading, interpolation.

Forces are spread from (and velocities interpolated at) per-element Gaussian
interaction points rather than mesh nodes.  Rules are chosen adaptively per
element so that the mapped points stay denser than a fraction rho_q of the
grid spacing, which keeps the Eulerian force density contiguous even for
structural meshes much coarser than the grid.

The force-prolongation operator S and velocity-restriction operator J = S*
share the same stencil sums, so the discrete pairing
    h^2 sum_faces (S F) . u == sum_pts w F(X_Q) . (interp u)(chi(X_Q))
holds to roundoff whenever both sides clip out-of-range faces identically
(which they do here).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import _core
from .kernels import KernelId, stencil_1d
from .structure.fem import SingularMassError, shape_functions, triangle_rule
from .structure.mesh import ReferenceMesh

__all__ = [
    "InteractionPointSet",
    "SpreadField",
    "QuadratureCapError",
    "QuadratureCache",
    "RULE_LADDER",
    "build_interaction_points",
    "spread",
    "interpolate",
    "restrict_velocity",
    "write_points_csv",
]

# ascending point counts; positive weights throughout, capped at 25 < 32
RULE_LADDER = [triangle_rule(d) for d in (1, 2, 4, 5, 6, 8, 10)]
MAX_POINTS_PER_ELEMENT = 32


class QuadratureCapError(RuntimeError):
    """Requested interaction-point density unreachable within the rule cap."""


@dataclass
class QuadratureCache:
    """Per-element rule memory; rules are re-selected only when an element's
    deformed diameter drifts more than 10% from the value at selection."""

    rule_index: np.ndarray | None = None
    diameter: np.ndarray | None = None


@dataclass
class InteractionPointSet:
    """Flattened per-element quadrature data used by spread/interpolate."""

    mesh: ReferenceMesh
    element_of: np.ndarray      # (npts,)
    ref_points: np.ndarray      # (npts, 2)  reference coordinates X_Q
    weights: np.ndarray         # (npts,)    reference-measure weights w_Q
    shape_vals: np.ndarray      # (npts, nen) cached phi_l(X_Q)
    positions: np.ndarray       # (npts, 2)  mapped chi(X_Q)
    rule_sizes: np.ndarray      # (ne,)
    over_coarse: bool = False

    @property
    def n_points(self) -> int:
        return self.ref_points.shape[0]

    def nodal_values(self, nodal: np.ndarray) -> np.ndarray:
        """Evaluate a nodal field at the interaction points."""
        gathered = nodal[self.mesh.elements[self.element_of]]
        return np.einsum("pl,pl...->p...", self.shape_vals, gathered)


@dataclass
class SpreadField:
    """Face-centered Eulerian force components produced by spreading."""

    fu: np.ndarray
    fv: np.ndarray
    clipped_entries: int = 0


def _map_points(mesh, positions, element_of, shape_vals):
    """chi(X_Q) in displacement form around each element's first node, so a
    rigid translation of chi translates the points bitwise-exactly."""
    conn = mesh.elements[element_of]
    anchor = positions[conn[:, 0]]
    rel = positions[conn] - anchor[:, None, :]
    return anchor + np.einsum("pl,plc->pc", shape_vals, rel)


def _element_diameters(mesh: ReferenceMesh, positions: np.ndarray) -> np.ndarray:
    pts = positions[mesh.elements]          # (ne, nen, 2)
    d = pts[:, :, None, :] - pts[:, None, :, :]
    return np.sqrt((d * d).sum(-1)).max(axis=(1, 2))


def _nn_ok(mapped: np.ndarray, limit: float) -> np.ndarray:
    """Per element: does every mapped point have a neighbor within limit?"""
    if mapped.shape[1] == 1:
        return np.zeros(mapped.shape[0], dtype=bool)  # handled by diameter rule
    d = mapped[:, :, None, :] - mapped[:, None, :, :]
    dist = np.sqrt((d * d).sum(-1))
    k = mapped.shape[1]
    dist[:, np.arange(k), np.arange(k)] = np.inf
    return dist.min(axis=2).max(axis=1) <= limit


def build_interaction_points(
    mesh: ReferenceMesh,
    positions: np.ndarray,
    h: float,
    rho_q: float = 0.5,
    mode: str = "adaptive",
    cache: QuadratureCache | None = None,
    strict: bool = False,
) -> InteractionPointSet:
    """Choose per-element Gauss rules dense enough for the current deformation.

    A rule is accepted when the mapped points' nearest-neighbor spacing is at
    most rho_q * h (a single point is accepted when the whole element fits in
    that radius).  When even the largest stored rule (25 points, under the
    32-point cap) is too sparse, the element is flagged as over-coarse, or a
    QuadratureCapError is raised in strict mode.
    """
    if h <= 0.0:
        raise ValueError("grid spacing must be positive")
    ne = mesh.n_elements
    limit = rho_q * h

    if mode == "nodal":
        nen = mesh.elements.shape[1]
        areas = np.abs(mesh.signed_areas())
        element_of = np.repeat(np.arange(ne), nen)
        if mesh.order == 1:
            ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        else:
            ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                            [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]])
        ref_points = np.tile(ref, (ne, 1))
        weights = np.repeat(areas / nen, nen)
        vals, _ = shape_functions(mesh.order, ref)
        shape_vals = np.tile(vals, (ne, 1))
        mapped = _map_points(mesh, positions, element_of, shape_vals)
        return InteractionPointSet(mesh, element_of, ref_points, weights,
                                   shape_vals, mapped,
                                   np.full(ne, nen, dtype=np.int64))
    if mode != "adaptive":
        raise ValueError("mode must be 'adaptive' or 'nodal'")

    diam = _element_diameters(mesh, positions)
    rule_idx = np.full(ne, -1, dtype=np.int64)

    if cache is not None and cache.rule_index is not None:
        keep = np.abs(diam - cache.diameter) <= 0.1 * cache.diameter
        rule_idx[keep] = cache.rule_index[keep]

    undecided = rule_idx < 0
    small = undecided & (diam <= limit)
    rule_idx[small] = 0
    undecided &= ~small

    areas2 = 2.0 * np.abs(mesh.signed_areas())
    shape_cache = {}
    for ri, (pts, wts) in enumerate(RULE_LADDER):
        if ri == 0 or not undecided.any():
            continue
        idx = np.nonzero(undecided)[0]
        vals, _ = shape_functions(mesh.order, pts)
        shape_cache[ri] = (pts, wts, vals)
        anchor = positions[mesh.elements[idx, 0]]
        rel = positions[mesh.elements[idx]] - anchor[:, None, :]
        mapped = anchor[:, None, :] + np.einsum("ql,elc->eqc", vals, rel)
        ok = _nn_ok(mapped, limit)
        rule_idx[idx[ok]] = ri
        undecided[idx[ok]] = False

    if undecided.any():
        if strict:
            raise QuadratureCapError(
                f"{int(undecided.sum())} element(s) need more than "
                f"{MAX_POINTS_PER_ELEMENT} interaction points for "
                f"rho_q*h = {limit:g}; structural mesh is over-coarse"
            )
        rule_idx[undecided] = len(RULE_LADDER) - 1

    if cache is not None:
        # remember diameters only where the rule was (re)selected
        if cache.rule_index is None:
            cache.diameter = diam.copy()
        else:
            changed = rule_idx != cache.rule_index
            cache.diameter = np.where(changed, diam, cache.diameter)
        cache.rule_index = rule_idx.copy()

    # assemble flattened arrays grouped by rule
    counts = np.array([RULE_LADDER[ri][0].shape[0] for ri in rule_idx])
    offsets = np.concatenate([[0], np.cumsum(counts)])
    total = int(offsets[-1])
    element_of = np.empty(total, dtype=np.int64)
    ref_points = np.empty((total, 2))
    weights = np.empty(total)
    nen = mesh.elements.shape[1]
    shape_vals = np.empty((total, nen))

    for ri in np.unique(rule_idx):
        pts, wts = RULE_LADDER[ri]
        vals, _ = shape_functions(mesh.order, pts)
        elems = np.nonzero(rule_idx == ri)[0]
        k = pts.shape[0]
        dest = (offsets[elems][:, None] + np.arange(k)).ravel()
        element_of[dest] = np.repeat(elems, k)
        ref_points[dest] = np.tile(pts, (elems.size, 1))
        # reference rule weights sum to 1/2; scale by 2*area per element
        weights[dest] = np.repeat(areas2[elems], k) * np.tile(wts, elems.size)
        shape_vals[dest] = np.tile(vals, (elems.size, 1))

    mapped = _map_points(mesh, positions, element_of, shape_vals)
    return InteractionPointSet(mesh, element_of, ref_points, weights,
                               shape_vals, mapped, counts,
                               over_coarse=bool(undecided.any()))


def _face_coords(pts: InteractionPointSet, grid, component: str):
    xi = (pts.positions[:, 0] - grid.x0) / grid.h
    yi = (pts.positions[:, 1] - grid.y0) / grid.h
    if component == "u":
        return xi, yi - 0.5
    return xi - 0.5, yi


def _check_in_domain(pts: InteractionPointSet, grid):
    # boundary-attached structures may wobble marginally outside; their
    # stencils clip.  Points beyond one cell have genuinely escaped.
    margin = grid.h
    x, y = pts.positions[:, 0], pts.positions[:, 1]
    bad = ((x < grid.x0 - margin) | (x > grid.x0 + grid.nx * grid.h + margin)
           | (y < grid.y0 - margin) | (y > grid.y0 + grid.ny * grid.h + margin))
    if bad.any():
        raise ValueError(
            f"{int(bad.sum())} interaction point(s) left the grid domain"
        )


def spread(F_nodal: np.ndarray, pts: InteractionPointSet, kernel: KernelId,
           grid) -> SpreadField:
    """Force prolongation: accumulate F(X_Q) delta_h(x - chi(X_Q)) w_Q on faces."""
    _check_in_domain(pts, grid)
    vals = pts.nodal_values(F_nodal) * pts.weights[:, None] / grid.h**2
    fu = np.zeros((grid.nx + 1, grid.ny))
    fv = np.zeros((grid.nx, grid.ny + 1))
    clipped = 0
    for component, f, col in (("u", fu, 0), ("v", fv, 1)):
        xi, yi = _face_coords(pts, grid, component)
        i0, wx = stencil_1d(kernel, xi)
        j0, wy = stencil_1d(kernel, yi)
        clipped += _core.scatter_stencil(
            f, np.ascontiguousarray(i0), np.ascontiguousarray(j0),
            np.ascontiguousarray(wx), np.ascontiguousarray(wy),
            np.ascontiguousarray(vals[:, col]),
        )
    return SpreadField(fu, fv, clipped)


def interpolate(u: np.ndarray, v: np.ndarray, pts: InteractionPointSet,
                kernel: KernelId, grid) -> np.ndarray:
    """Velocity at the interaction points: sum_faces u delta_h(...) h^2."""
    _check_in_domain(pts, grid)
    out = np.empty((pts.n_points, 2))
    for component, f, col in (("u", u, 0), ("v", v, 1)):
        xi, yi = _face_coords(pts, grid, component)
        i0, wx = stencil_1d(kernel, xi)
        j0, wy = stencil_1d(kernel, yi)
        out[:, col] = _core.gather_stencil(
            np.ascontiguousarray(f), np.ascontiguousarray(i0),
            np.ascontiguousarray(j0), np.ascontiguousarray(wx),
            np.ascontiguousarray(wy),
        )
    return out


def restrict_velocity(pts: InteractionPointSet, point_velocities: np.ndarray,
                      lumping: str = "lumped", tol: float = 1e-12) -> np.ndarray:
    """L2-project point velocities onto the FE basis: solve M U = r.

    The mass uses the interaction-point weights themselves, which makes the
    restriction the exact adjoint of spreading and reproduces constants.
    """
    mesh = pts.mesh
    conn = mesh.elements[pts.element_of]
    r = np.zeros((mesh.n_nodes, 2))
    contrib = pts.shape_vals[:, :, None] * (pts.weights[:, None, None]
                                            * point_velocities[:, None, :])
    np.add.at(r, conn, contrib)

    if lumping == "lumped":
        m = np.zeros(mesh.n_nodes)
        np.add.at(m, conn, pts.shape_vals * pts.weights[:, None])
        if np.any(m <= 1e-10 * m.max()):
            raise SingularMassError(
                "lumped interaction mass is singular; use lumping='consistent'"
            )
        return r / m[:, None]
    if lumping == "consistent":
        from scipy.sparse import coo_matrix
        from scipy.sparse.linalg import cg

        nen = conn.shape[1]
        blocks = np.einsum("pl,pk,p->plk", pts.shape_vals, pts.shape_vals,
                           pts.weights)
        rows = np.repeat(conn, nen, axis=1).ravel()
        cols = np.tile(conn, (1, nen)).ravel()
        n = mesh.n_nodes
        M = coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()
        out = np.empty_like(r)
        for c in range(2):
            sol, info = cg(M, r[:, c], rtol=tol, atol=0.0, maxiter=2000)
            if info != 0:
                raise RuntimeError(f"restriction CG failed (info={info})")
            out[:, c] = sol
        return out
    raise ValueError("lumping must be 'lumped' or 'consistent'")


def write_points_csv(pts: InteractionPointSet, path) -> None:
    """Diagnostic dump: element,q,X1,X2,chi1,chi2,w."""
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["element", "q", "X1", "X2", "chi1", "chi2", "w"])
        q = 0
        last = -1
        for p in range(pts.n_points):
            e = int(pts.element_of[p])
            q = q + 1 if e == last else 0
            last = e
            w.writerow([e, q, *pts.ref_points[p], *pts.positions[p],
                        pts.weights[p]])
