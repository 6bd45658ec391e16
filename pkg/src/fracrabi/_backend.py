"""Kernel backend selection.

The compiled Cython extension is preferred when present; the pure-numpy
twin is the fallback.  ``FRAC_RABI_PURE_PYTHON=1`` forces the fallback
(useful for benchmarking and for debugging the reference semantics).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("FRAC_RABI_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

ml_taylor_sum = _impl.ml_taylor_sum
volterra_solve = _impl.volterra_solve
