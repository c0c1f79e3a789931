"""Backend selection for the hot kernels.

The compiled Cython extension is preferred; the numpy fallback is selected
when the extension is missing or when IFED_BACKEND=numpy is set.  Both expose
the same functions with identical semantics.
"""

import os

_requested = os.environ.get("IFED_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "numpy"):
    raise RuntimeError(
        f"IFED_BACKEND must be 'compiled' or 'numpy', got {_requested!r}"
    )

if _requested == "numpy":
    from . import fallback as _impl
    BACKEND = "numpy"
else:
    try:
        from . import _compiled as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import fallback as _impl
        BACKEND = "numpy"

scatter_stencil = _impl.scatter_stencil
gather_stencil = _impl.gather_stencil
rbgs_sweep = _impl.rbgs_sweep
laplace_residual = _impl.laplace_residual
laplace_apply = _impl.laplace_apply
fill_phi_ghosts = _impl.fill_phi_ghosts
helmholtz_residual = _impl.helmholtz_residual

__all__ = [
    "BACKEND",
    "scatter_stencil",
    "gather_stencil",
    "rbgs_sweep",
    "laplace_residual",
    "laplace_apply",
    "fill_phi_ghosts",
    "helmholtz_residual",
]
