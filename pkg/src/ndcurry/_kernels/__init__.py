"""Hot kernels: the compiled extension when it was built, else pure Python.

Set ``NDCURRY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernel as pykernel

ckernel = None
if not os.environ.get("NDCURRY_PURE_PYTHON"):
    try:
        from . import _ckernel as ckernel
    except ImportError:  # extension not built
        ckernel = None

kernel = ckernel if ckernel is not None else pykernel
BACKEND = kernel.BACKEND

__all__ = ["kernel", "pykernel", "ckernel", "BACKEND"]
