"""Pick the kernel implementation at import time.

The compiled ``_kernels`` extension is preferred.  Setting the environment
variable ``INTERP_LAB_PURE_PYTHON=1`` forces the numpy fallback, which is
also used whenever the extension has not been built.
"""

from __future__ import annotations

import os

from interp_lab import _kernels_py


def _load():
    if os.environ.get("INTERP_LAB_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py
    try:
        from interp_lab import _kernels
    except ImportError:
        return _kernels_py
    return _kernels


kernels = _load()
BACKEND = kernels.NAME
