"""Select the kernel implementation at import time.

The compiled ``_ckernels`` extension is used when it was built; setting
``COHORT_BIAS_LAB_PURE=1`` forces the pure-Python kernels.
"""
import os

from . import _pykernels

if os.environ.get("COHORT_BIAS_LAB_PURE", "").strip() not in ("", "0"):
    kernels = _pykernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        kernels = _pykernels

BACKEND = kernels.NAME
