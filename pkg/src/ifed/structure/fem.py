"""Finite-element machinery for immersed structures.

Shape functions live on the unit reference triangle (vertices (0,0), (1,0),
(0,1)); the geometric map is affine (vertex-based), so P2 elements are
straight-sided with true midpoint nodes.  Internal elastic forces follow the
unified weak form: the distributional force is projected onto the FE basis by
solving M F = b with b_l = -int P : grad(phi_l) dX, using a row-sum lumped
mass by default or the consistent mass via CG.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import cg

from .mesh import ReferenceMesh

__all__ = [
    "ElementInversionError",
    "SingularMassError",
    "DeformationGradient",
    "Tether",
    "NeoHookean",
    "RigidPenalty",
    "StructureState",
    "Assembler",
    "TRIANGLE_RULES",
    "triangle_rule",
    "shape_functions",
    "shape_eval",
    "deformation_gradient",
    "pk1_neo_hookean",
    "pk1_volumetric",
    "energy_neo_hookean",
    "energy_volumetric",
    "tether_force_density",
    "assemble_internal_force",
]


class ElementInversionError(RuntimeError):
    def __init__(self, element_ids, time=None):
        self.element_ids = np.atleast_1d(element_ids)
        self.time = time
        when = "" if time is None else f" at t={time:g}"
        super().__init__(
            f"inverted element(s) {self.element_ids.tolist()}{when}: det F <= 0"
        )


class SingularMassError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# symmetric Gauss rules on the unit triangle (weights sum to the area 1/2,
# all weights positive).  Verified against monomial integrals in the tests.
# ---------------------------------------------------------------------------

def _expand(groups):
    """Expand (weight, barycentric-coords) orbit groups into point lists."""
    pts, wts = [], []
    for w, bary in groups:
        a, b, c = bary
        if a == b == c:
            perms = {(a, b, c)}
        else:
            perms = {
                (a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)
            }
        for p in sorted(perms):
            pts.append((p[1], p[2]))  # (xi, eta) with lambda0 = p[0]
            wts.append(w)
    return np.array(pts), 0.5 * np.array(wts)


TRIANGLE_RULES = {
    1: _expand([(1.0, (1 / 3, 1 / 3, 1 / 3))]),
    2: _expand([(1 / 3, (2 / 3, 1 / 6, 1 / 6))]),
    4: _expand([
        (0.223381589678011, (0.108103018168070, 0.445948490915965, 0.445948490915965)),
        (0.109951743655322, (0.816847572980459, 0.091576213509771, 0.091576213509771)),
    ]),
    5: _expand([
        (0.225, (1 / 3, 1 / 3, 1 / 3)),
        (0.132394152788506, (0.059715871789770, 0.470142064105115, 0.470142064105115)),
        (0.125939180544827, (0.797426985353087, 0.101286507323456, 0.101286507323456)),
    ]),
    6: _expand([
        (0.116786275726379, (0.501426509658179, 0.249286745170910, 0.249286745170910)),
        (0.050844906370207, (0.873821971016996, 0.063089014491502, 0.063089014491502)),
        (0.082851075618374, (0.053145049844817, 0.310352451033784, 0.636502499121399)),
    ]),
    # 16- and 25-point symmetric rules for the interaction-point ladder;
    # orbit weights refined to machine precision against the monomial
    # moments (fully symmetric rules keep quadrature clouds invariant under
    # vertex relabeling, e.g. mirrored meshes)
    8: _expand([
        (2 * 0.072157803838879944, (1 / 3, 1 / 3, 1 / 3)),
        (2 * 0.047545817133651011,
         (1 - 2 * 0.45929258829270653, 0.45929258829270653, 0.45929258829270653)),
        (2 * 0.051608685267363473,
         (1 - 2 * 0.1705693077517404, 0.1705693077517404, 0.1705693077517404)),
        (2 * 0.016229248811600382,
         (1 - 2 * 0.050547228317032025, 0.050547228317032025, 0.050547228317032025)),
        (2 * 0.013615157087212577,
         (0.26311282963469812, 0.0083947774099260002,
          1 - 0.26311282963469812 - 0.0083947774099260002)),
    ]),
    10: _expand([
        (2 * 0.045408995191033148, (1 / 3, 1 / 3, 1 / 3)),
        (2 * 0.018362978878334782,
         (1 - 2 * 0.48557763338350307, 0.48557763338350307, 0.48557763338350307)),
        (2 * 0.02266052971781192,
         (1 - 2 * 0.10948157548519512, 0.10948157548519512, 0.10948157548519512)),
        (2 * 0.036378958422609894,
         (0.14170721941540393, 0.30793983876409409,
          1 - 0.14170721941540393 - 0.30793983876409409)),
        (2 * 0.014163621265593559,
         (0.025003534762818424, 0.24667256064031404,
          1 - 0.025003534762818424 - 0.24667256064031404)),
        (2 * 0.004710833481884333,
         (0.0095408154002898943, 0.066803251012360509,
          1 - 0.0095408154002898943 - 0.066803251012360509)),
    ]),
}


def triangle_rule(degree: int):
    """Smallest stored rule exact to at least the requested degree."""
    for deg in sorted(TRIANGLE_RULES):
        if deg >= degree:
            return TRIANGLE_RULES[deg]
    raise ValueError(f"no stored triangle rule of degree {degree}")


def shape_functions(order: int, xi: np.ndarray):
    """Values and reference gradients at points xi (..., 2) on the unit triangle."""
    xi = np.asarray(xi, dtype=float)
    x, y = xi[..., 0], xi[..., 1]
    l0, l1, l2 = 1.0 - x - y, x, y
    if order == 1:
        vals = np.stack([l0, l1, l2], axis=-1)
        grads = np.broadcast_to(
            np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]), xi.shape[:-1] + (3, 2)
        ).copy()
        return vals, grads
    if order == 2:
        vals = np.stack([
            l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
            4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0,
        ], axis=-1)
        z = np.zeros_like(x)
        grads = np.stack([
            np.stack([4 * (x + y) - 3, 4 * (x + y) - 3], axis=-1),
            np.stack([4 * l1 - 1, z], axis=-1),
            np.stack([z, 4 * l2 - 1], axis=-1),
            np.stack([4 * (l0 - l1), -4 * l1], axis=-1),
            np.stack([4 * l2, 4 * l1], axis=-1),
            np.stack([-4 * l2, 4 * (l0 - l2)], axis=-1),
        ], axis=-2)
        return vals, grads
    raise ValueError("order must be 1 or 2")


def _geometry(mesh: ReferenceMesh):
    """Affine map data per element: Jacobian inverse (transposed use) and detJ."""
    v = mesh.nodes[mesh.elements[:, :3]]
    jac = np.stack([v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]], axis=-1)  # (ne,2,2)
    det = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    if np.any(np.abs(det) < 1e-300):
        raise ElementInversionError(np.nonzero(np.abs(det) < 1e-300)[0])
    inv = np.empty_like(jac)
    inv[:, 0, 0] = jac[:, 1, 1]
    inv[:, 0, 1] = -jac[:, 0, 1]
    inv[:, 1, 0] = -jac[:, 1, 0]
    inv[:, 1, 1] = jac[:, 0, 0]
    inv /= det[:, None, None]
    return inv, det


def shape_eval(mesh: ReferenceMesh, element: int, xi):
    """Shape values and physical-frame gradients at one reference point."""
    vals, ref_grads = shape_functions(mesh.order, np.asarray(xi, dtype=float))
    inv, _ = _geometry(mesh)
    grads = ref_grads @ inv[element]
    return vals, grads


@dataclass
class DeformationGradient:
    F: np.ndarray
    J: float


def deformation_gradient(mesh: ReferenceMesh, positions: np.ndarray,
                         element: int, xi, time=None) -> DeformationGradient:
    """F = sum_l chi_l (x) grad(phi_l) at a reference point of one element.

    Computed as I + sum_l (chi_l - X_l) (x) grad(phi_l) so that the reference
    configuration yields the identity exactly.
    """
    _, grads = shape_eval(mesh, element, xi)
    disp = positions[mesh.elements[element]] - mesh.nodes[mesh.elements[element]]
    F = np.eye(2) + np.einsum("lc,ld->cd", disp, grads)
    J = float(np.linalg.det(F))
    if J <= 0.0:
        raise ElementInversionError([element], time)
    return DeformationGradient(F, J)


# ---------------------------------------------------------------------------
# material models
# ---------------------------------------------------------------------------

def _require_nonneg(**params):
    for name, value in params.items():
        if value < 0.0:
            raise ValueError(f"{name} must be >= 0, got {value}")


@dataclass(frozen=True)
class Tether:
    """Penalty body force kappa (X - chi) - eta U approximating rigidity."""

    kappa: float
    eta: float = 0.0

    def __post_init__(self):
        _require_nonneg(kappa=self.kappa, eta=self.eta)


@dataclass(frozen=True)
class NeoHookean:
    """Incompressible neo-Hookean response plus volumetric stabilization."""

    shear_modulus: float
    bulk_beta: float = 0.0

    def __post_init__(self):
        _require_nonneg(shear_modulus=self.shear_modulus, bulk_beta=self.bulk_beta)


@dataclass(frozen=True)
class RigidPenalty:
    """Stiff neo-Hookean wall material combined with a tether penalty."""

    c_wall: float
    kappa: float
    eta: float = 0.0
    bulk_beta: float = 0.0

    def __post_init__(self):
        _require_nonneg(c_wall=self.c_wall, kappa=self.kappa, eta=self.eta,
                        bulk_beta=self.bulk_beta)

    @property
    def tether(self) -> Tether:
        return Tether(self.kappa, self.eta)

    @property
    def elastic(self) -> NeoHookean:
        return NeoHookean(self.c_wall, self.bulk_beta)


def _det2(F):
    return F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]


def _inv_transpose2(F, J):
    out = np.empty_like(F)
    out[..., 0, 0] = F[..., 1, 1]
    out[..., 0, 1] = -F[..., 1, 0]
    out[..., 1, 0] = -F[..., 0, 1]
    out[..., 1, 1] = F[..., 0, 0]
    return out / J[..., None, None]


def pk1_neo_hookean(F: np.ndarray, shear_modulus: float) -> np.ndarray:
    """First Piola-Kirchhoff stress of W = G/2 (I1_bar - 3), plane strain.

    The 2D gradient embeds as C3D = diag(C2D, 1), so
    I1_bar = J^(-2/3) (|F|^2 + 1) with J = det F.
    """
    F = np.asarray(F, dtype=float)
    J = _det2(F)
    if np.any(J <= 0.0):
        raise ElementInversionError(np.nonzero(np.atleast_1d(J) <= 0.0)[0])
    FinvT = _inv_transpose2(F, J)
    I1 = np.sum(F * F, axis=(-2, -1)) + 1.0
    scale = shear_modulus * J ** (-2.0 / 3.0)
    return scale[..., None, None] * (F - (I1 / 3.0)[..., None, None] * FinvT)


def pk1_volumetric(F: np.ndarray, beta: float) -> np.ndarray:
    """Stress of the stabilization energy U(J) = beta (J ln J - J + 1)."""
    F = np.asarray(F, dtype=float)
    J = _det2(F)
    if np.any(J <= 0.0):
        raise ElementInversionError(np.nonzero(np.atleast_1d(J) <= 0.0)[0])
    FinvT = _inv_transpose2(F, J)
    return (beta * np.log(J) * J)[..., None, None] * FinvT


def energy_neo_hookean(F, shear_modulus):
    F = np.asarray(F, dtype=float)
    J = _det2(F)
    return 0.5 * shear_modulus * (J ** (-2.0 / 3.0) * (np.sum(F * F, axis=(-2, -1)) + 1.0) - 3.0)


def energy_volumetric(F, beta):
    J = _det2(np.asarray(F, dtype=float))
    return beta * (J * np.log(J) - J + 1.0)


def tether_force_density(X, chi, U, kappa: float, eta: float) -> np.ndarray:
    """Penalty force density kappa (X - chi) - eta U."""
    return kappa * (np.asarray(X, float) - np.asarray(chi, float)) - eta * np.asarray(U, float)


@dataclass
class StructureState:
    """Nodal positions, velocities and force densities of one body."""

    positions: np.ndarray
    velocities: np.ndarray
    forces: np.ndarray
    time: float = 0.0

    @classmethod
    def at_rest(cls, mesh: ReferenceMesh, time: float = 0.0) -> "StructureState":
        m = mesh.n_nodes
        return cls(mesh.nodes.copy(), np.zeros((m, 2)), np.zeros((m, 2)), time)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

class Assembler:
    """Precomputed quadrature data for elastic force assembly on one mesh."""

    def __init__(self, mesh: ReferenceMesh, quad_degree: int | None = None):
        self.mesh = mesh
        if quad_degree is None:
            quad_degree = 2 if mesh.order == 1 else 4
        pts, wts = triangle_rule(quad_degree)
        inv, det = _geometry(mesh)
        vals, ref_grads = shape_functions(mesh.order, pts)      # (nq,nen),(nq,nen,2)
        self.qp_ref = pts
        self.shape_vals = vals
        # physical-frame gradients, per element and quadrature point
        self.grads = np.einsum("qld,edc->eqlc", ref_grads, inv)
        self.weights = wts[None, :] * det[:, None]              # (ne, nq)

    def lumped_mass(self) -> np.ndarray:
        """Row-sum mass: integral of each shape function over the body."""
        m = np.zeros(self.mesh.n_nodes)
        contrib = self.weights[:, :, None] * self.shape_vals[None, :, :]
        np.add.at(m, self.mesh.elements, contrib.sum(axis=1))
        return m

    def consistent_mass(self):
        nen = self.shape_vals.shape[1]
        blocks = np.einsum("eq,ql,qk->elk", self.weights, self.shape_vals,
                           self.shape_vals)
        rows = np.repeat(self.mesh.elements, nen, axis=1).ravel()
        cols = np.tile(self.mesh.elements, (1, nen)).ravel()
        n = self.mesh.n_nodes
        return coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()

    def deformation_gradients(self, positions: np.ndarray, time=None):
        """F and J at every quadrature point; raises on inverted elements.

        Uses the displacement gradient so chi = X gives the identity (and a
        bitwise-zero force) exactly.
        """
        disp = (positions - self.mesh.nodes)[self.mesh.elements]  # (ne, nen, 2)
        F = np.einsum("elc,eqld->eqcd", disp, self.grads)
        F[..., 0, 0] += 1.0
        F[..., 1, 1] += 1.0
        J = _det2(F)
        if np.any(J <= 0.0):
            bad = np.unique(np.nonzero(np.any(J <= 0.0, axis=1))[0])
            raise ElementInversionError(bad, time)
        return F, J

    def internal_force_rhs(self, positions: np.ndarray, shear_modulus: float,
                           bulk_beta: float, time=None) -> np.ndarray:
        """b_l = -int P : grad(phi_l) dX by element quadrature."""
        F, J = self.deformation_gradients(positions, time)
        P = np.zeros_like(F)
        if shear_modulus != 0.0:
            P += pk1_neo_hookean(F, shear_modulus)
        if bulk_beta != 0.0:
            P += pk1_volumetric(F, bulk_beta)
        contrib = -np.einsum("eq,eqcd,eqld->elc", self.weights, P, self.grads)
        b = np.zeros((self.mesh.n_nodes, 2))
        np.add.at(b, self.mesh.elements, contrib)
        return b

    def project(self, b: np.ndarray, lumping: str = "lumped",
                tol: float = 1e-12) -> np.ndarray:
        """Solve M F = b for the nodal force density."""
        if lumping == "lumped":
            m = self.lumped_mass()
            if np.any(m <= 1e-10 * m.max()):
                raise SingularMassError(
                    "row-sum lumped mass has non-positive entries "
                    "(zero-measure node support); use lumping='consistent'"
                )
            return b / m[:, None]
        if lumping == "consistent":
            M = self.consistent_mass()
            out = np.empty_like(b)
            for c in range(2):
                sol, info = cg(M, b[:, c], rtol=tol, atol=0.0, maxiter=2000)
                if info != 0:
                    raise RuntimeError(f"consistent-mass CG failed (info={info})")
                out[:, c] = sol
            return out
        raise ValueError("lumping must be 'lumped' or 'consistent'")


def assemble_internal_force(mesh_or_assembler, state: StructureState, material,
                            lumping: str = "lumped") -> np.ndarray:
    """Nodal force density for a material model at the current configuration.

    Tether contributions are nodal; elastic contributions are the L2
    projection of the weak-form right-hand side.
    """
    if isinstance(mesh_or_assembler, Assembler):
        asm = mesh_or_assembler
    else:
        asm = Assembler(mesh_or_assembler)

    F = np.zeros((asm.mesh.n_nodes, 2))
    if isinstance(material, Tether):
        return tether_force_density(asm.mesh.nodes, state.positions,
                                    state.velocities, material.kappa, material.eta)
    if isinstance(material, NeoHookean):
        b = asm.internal_force_rhs(state.positions, material.shear_modulus,
                                   material.bulk_beta, state.time)
        return asm.project(b, lumping=lumping)
    if isinstance(material, RigidPenalty):
        b = asm.internal_force_rhs(state.positions, material.c_wall,
                                   material.bulk_beta, state.time)
        F = asm.project(b, lumping=lumping)
        F += tether_force_density(asm.mesh.nodes, state.positions,
                                  state.velocities, material.kappa, material.eta)
        return F
    raise TypeError(f"unknown material model {material!r}")
