"""Numba switch.

Hot kernels are written once in the numba-compatible subset of Python and
decorated with :func:`jit`.  Setting ``GRAPHONLAB_NUMBA=0`` in the
environment (before import) turns the decorator into the identity, so the
same kernels run as plain Python/NumPy.  Modules that ship a separately
vectorised NumPy path consult :data:`USE_NUMBA` to pick one.
"""

import os

_flag = os.environ.get("GRAPHONLAB_NUMBA", "1").strip().lower()
USE_NUMBA = _flag not in ("0", "false", "no", "off")

if USE_NUMBA:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if USE_NUMBA:

    def jit(fn):
        return _njit(cache=True, nogil=True)(fn)

else:

    def jit(fn):
        return fn


def backend():
    return "numba" if USE_NUMBA else "numpy"
