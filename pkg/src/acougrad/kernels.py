"""Backend selection for the time-marching kernels.

The compiled extension is used when it imported cleanly; setting
``ACOUGRAD_PURE_PYTHON=1`` forces the numpy implementation.
"""

import os

from . import _pykernels

try:
    if os.environ.get("ACOUGRAD_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

forward_march = _impl.forward_march
backward_march = _impl.backward_march

BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl
