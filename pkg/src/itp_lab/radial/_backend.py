"""Kernel selection at import time."""
import os

if os.environ.get("ITP_LAB_PURE", "") not in ("", "0"):
    from . import _kernels_py as kernel
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernel
        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernel
        BACKEND = "python"
