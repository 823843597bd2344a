"""Hot numerical kernels with a compiled core and a numpy fallback.

The compiled extension is preferred when importable; set the environment
variable SENSAKIT_PURE_PYTHON to any non-empty value to force the fallback.
``BACKEND`` records which one is active.
"""

import os

from . import _numpy_impl

if os.environ.get("SENSAKIT_PURE_PYTHON"):
    _impl = _numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import _ext as _impl

        BACKEND = "ext"
    except ImportError:
        _impl = _numpy_impl
        BACKEND = "numpy"

pair_sums = _impl.pair_sums
prim_mst = _impl.prim_mst

__all__ = ["BACKEND", "pair_sums", "prim_mst", "_numpy_impl"]
