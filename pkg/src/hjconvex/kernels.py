"""Backend selection for the stencil kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation is loaded. Set ``HJCONVEX_PURE_PYTHON=1`` to force the
fallback (useful for benchmarking and for debugging the extension).
"""

import os

from hjconvex import _pykernels

if os.environ.get("HJCONVEX_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from hjconvex import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

stencils = _impl.stencils
stencils_adjoint = _impl.stencils_adjoint

__all__ = ["BACKEND", "stencils", "stencils_adjoint"]
