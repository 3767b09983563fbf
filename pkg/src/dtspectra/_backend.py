"""Numba / pure-numpy backend selection.

Set ``DTSPECTRA_DISABLE_NUMBA=1`` before import to force the numpy path.
The numba path is also skipped silently when numba cannot be imported.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

NUMBA_DISABLED = os.environ.get("DTSPECTRA_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    import numba
    from numba.extending import register_jitable as jitable

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

    def jitable(func):
        return func


USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """Compile ``func`` in nopython mode, or return ``None`` without numba."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, error_model="numpy")(func)
