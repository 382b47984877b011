"""Pick the compiled kernels when available, else the NumPy fallback.

Set ``STLF_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

backend = _kernels_py
BACKEND_NAME = "python"

if os.environ.get("STLF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as backend  # type: ignore[no-redef]

        BACKEND_NAME = "cython"
    except ImportError:
        backend = _kernels_py

HAVE_EXTENSION = BACKEND_NAME == "cython"

elman_scan = backend.elman_scan
hopfield_recall = backend.hopfield_recall
mamdani_aggregate = backend.mamdani_aggregate
