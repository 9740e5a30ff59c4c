"""Kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to the
pure-Python twin otherwise.  Set LSYSTOOL_PURE=1 to force the fallback
(used by the backend-equivalence tests and the benchmark).
"""

import os

if os.environ.get("LSYSTOOL_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.IMPLEMENTATION
line_pixels = kernels.line_pixels
fill_mask = kernels.fill_mask
