"""Numba switch for the hot kernels.

Set ``ALONGINV_NUMBA=0`` in the environment (before import) to run every
kernel through its pure-numpy path.  Numba is also skipped silently when it
is not importable.
"""

from __future__ import annotations

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("ALONGINV_NUMBA", "1").lower() not in (
    "0",
    "false",
    "no",
    "off",
)

# name -> (jitted dispatcher or None, numpy function)
KERNELS: dict = {}


def kernel(fallback=None):
    """Register a loop kernel.

    The decorated function is compiled with ``numba.njit`` when numba is
    enabled.  Otherwise ``fallback`` runs, or the undecorated function when no
    dedicated numpy version exists (such kernels are written with array
    slicing so they are still vectorised per row/column).
    """

    def wrap(func):
        py = fallback if fallback is not None else func
        jitted = numba.njit(cache=True)(func) if numba is not None else None
        KERNELS[func.__name__] = (jitted, py)
        return jitted if USE_NUMBA else py

    return wrap


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
