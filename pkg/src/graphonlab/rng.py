"""Counter-based random numbers.

Every uniform is a pure function of ``(seed, stream, a, b)`` obtained by
chaining the splitmix64 finaliser.  Latent coordinates use
``(seed, LATENT, i, 0)`` and edge coins use ``(seed, EDGE, i, j)``, so a
sample does not depend on evaluation order, block size or thread count.

Three implementations of the same hash are kept bit-compatible (tested):
Python ints for seed derivation, vectorised NumPy, and a numba scalar kernel.
"""

import numpy as np

from ._accel import jit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

LATENT = 1
EDGE = 2
REPLICATE = 3
MONTE_CARLO = 4
ALPHA = 5


def mix64(z):
    """splitmix64 finaliser on a Python int (taken mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash64(seed, stream, a, b):
    h = mix64(seed ^ ((stream * GOLDEN) & MASK64))
    h = mix64(h + (a + 1) * GOLDEN)
    return mix64(h + (b + 1) * GOLDEN)


def uniform(seed, stream, a, b):
    return (hash64(seed, stream, a, b) >> 11) * _INV53


def derive_seed(master, *tags):
    """Child seed for ``tags`` (e.g. replicate index); disjoint from the parent stream."""
    h = mix64(master ^ ((REPLICATE * GOLDEN) & MASK64))
    for t in tags:
        h = mix64(h + (int(t) + 1) * GOLDEN)
    return h


# -- vectorised NumPy ---------------------------------------------------------

_U = np.uint64


def _mix64_np(z):
    z = (z ^ (z >> _U(30))) * _U(_M1)
    z = (z ^ (z >> _U(27))) * _U(_M2)
    return z ^ (z >> _U(31))


def hash64_np(seed, stream, a, b):
    """Vectorised :func:`hash64`; ``a`` and ``b`` broadcast."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h0 = np.array([(seed ^ ((stream * GOLDEN) & MASK64)) & MASK64], dtype=np.uint64)
        h = _mix64_np(h0)
        h = _mix64_np(h + (a + _U(1)) * _U(GOLDEN))
        h = _mix64_np(h + (b + _U(1)) * _U(GOLDEN))
    return h


def uniform_np(seed, stream, a, b):
    return (hash64_np(seed, stream, a, b) >> _U(11)).astype(np.float64) * _INV53


def generator(seed, *tags):
    """A NumPy Generator for bulk draws that need no per-item addressing."""
    return np.random.Generator(np.random.Philox(key=derive_seed(seed, MONTE_CARLO, *tags)))


# -- numba scalar -------------------------------------------------------------


@jit
def _mix64_nb(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


@jit
def uniform_nb(key, a, b):
    """``key`` is ``mix64(seed ^ stream*GOLDEN)`` precomputed by the caller."""
    h = _mix64_nb(key + (np.uint64(a) + np.uint64(1)) * np.uint64(GOLDEN))
    h = _mix64_nb(h + (np.uint64(b) + np.uint64(1)) * np.uint64(GOLDEN))
    return np.float64(h >> np.uint64(11)) * _INV53


def stream_key(seed, stream):
    return mix64(seed ^ ((stream * GOLDEN) & MASK64))
