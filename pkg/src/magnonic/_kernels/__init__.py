"""Integrator kernels with a compiled fast path.

The compiled extension is used when it imports cleanly; otherwise the numpy
fallback takes over.  Set MAGNONIC_PURE_PYTHON=1 to force the fallback.  The
active choice is exposed as BACKEND ("cython" or "python").
"""

from __future__ import annotations

import os

from . import _ode_py

if os.environ.get("MAGNONIC_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _ode_py
    BACKEND = "python"
else:
    try:
        from . import _ode_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _ode_py
        BACKEND = "python"

mean_field_relax = _impl.mean_field_relax
covariance_relax = _impl.covariance_relax

__all__ = ["BACKEND", "mean_field_relax", "covariance_relax"]
