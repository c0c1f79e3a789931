from .fem import (
    Assembler,
    DeformationGradient,
    ElementInversionError,
    NeoHookean,
    RigidPenalty,
    SingularMassError,
    StructureState,
    Tether,
    assemble_internal_force,
    deformation_gradient,
    energy_neo_hookean,
    energy_volumetric,
    pk1_neo_hookean,
    pk1_volumetric,
    shape_eval,
    shape_functions,
    tether_force_density,
    triangle_rule,
)
from .mesh import (
    MfacReport,
    ReferenceMesh,
    disc_mesh,
    mfac_of,
    read_mesh,
    rect_mesh,
    sheared_rect_mesh,
    write_mesh,
)

__all__ = [n for n in dir() if not n.startswith("_")]
