from .convection import convective_term
from .grid import (
    BoundarySpec,
    FlowState,
    MACGrid,
    NoSlip,
    NormalTractionTangentialVelocity,
    NormalVelocityTangentialTraction,
    Periodic,
    VelocityDirichlet,
    apply_fixed_faces,
    divergence,
    face_coords,
    fill_ghosts,
)
from .poisson import PoissonSolver, SolverError, helmholtz_solve
from .solver import StokesSolver

__all__ = [n for n in dir() if not n.startswith("_")]
