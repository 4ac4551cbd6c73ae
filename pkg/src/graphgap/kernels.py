"""Kernel dispatch: the compiled extension when importable, else the numpy fallback.

Set ``GRAPHGAP_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GRAPHGAP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
secular_batch = _impl.secular_batch
binned_minplus = _impl.binned_minplus

__all__ = ["BACKEND", "secular_batch", "binned_minplus", "_kernels_py"]
