"""Kernel backend selection.

``RADPOSE_BACKEND=numpy`` forces the pure-numpy kernels; the default is numba
when it can be imported. The flag is read once, at import time.
"""

import os

_requested = os.environ.get("RADPOSE_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"RADPOSE_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"
