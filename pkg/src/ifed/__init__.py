"""2D immersed finite element/difference (IFED) fluid-structure interaction toolkit."""

import os

# Worker cap must land in the environment before numpy/BLAS are imported
# anywhere in the package, so it lives at the very top of the root module.
_threads = os.environ.get("IFED_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)
del os, _threads

__version__ = "0.1.0"
