"""W-random graphs with retained latent coordinates.

Latent ``X_i`` is ``uniform(seed, LATENT, i, 0)`` and pair ``i < j`` is an
edge iff ``uniform(seed, EDGE, i, j) < W(X_i, X_j)`` (0-indexed vertices).
Every coin is a pure function of its coordinates, so a sample does not
depend on evaluation order and the numba and NumPy paths agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel, rng
from ._accel import jit
from .bitset import num_words, pack_rows, row_popcounts, unpack_rows
from .errors import DomainError, SizeError
from .graphs import SimpleGraph


@dataclass(frozen=True, eq=False)
class SampledGraph:
    n: int
    bits: np.ndarray
    latent: np.ndarray
    seed: int

    def adjacency(self):
        return unpack_rows(self.bits, self.n)

    def has_edge(self, i, j):
        """0-indexed adjacency test."""
        return bool((int(self.bits[i, j >> 6]) >> (j & 63)) & 1)

    @property
    def num_edges(self):
        return int(row_popcounts(self.bits).sum()) // 2

    def to_simple_graph(self):
        a = self.adjacency()
        i, j = np.nonzero(np.triu(a, 1))
        return SimpleGraph(self.n, frozenset(zip((i + 1).tolist(), (j + 1).tolist())))

    def to_edgelist(self):
        return self.to_simple_graph().to_edgelist()

    def latent_csv(self):
        lines = ["vertex,latent"] + [f"{i + 1},{x!r}" for i, x in enumerate(self.latent.tolist())]
        return "\n".join(lines) + "\n"


def latents(n, seed):
    return rng.uniform_np(seed, rng.LATENT, np.arange(n, dtype=np.uint64), np.zeros(n, dtype=np.uint64))


@jit
def _fill_nb(prob, key, rows):
    n = prob.shape[0]
    one = np.uint64(1)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform_nb(key, i, j) < prob[i, j]:
                rows[i, j >> 6] |= one << np.uint64(j & 63)
                rows[j, i >> 6] |= one << np.uint64(i & 63)


def _fill_np(prob, seed):
    n = prob.shape[0]
    i, j = np.triu_indices(n, 1)
    u = rng.uniform_np(seed, rng.EDGE, i.astype(np.uint64), j.astype(np.uint64))
    dense = np.zeros((n, n), dtype=bool)
    hit = u < prob[i, j]
    dense[i[hit], j[hit]] = True
    dense |= dense.T
    return pack_rows(dense)


def sample(W, n, seed, latent=None, use_numba=None):
    """Draw G_n(W).  Passing ``latent`` freezes X (frozen-latent mode)."""
    n = int(n)
    if n < 1:
        raise SizeError("need at least one vertex")
    seed = int(seed) & rng.MASK64
    if latent is None:
        x = latents(n, seed)
    else:
        x = np.asarray(latent, dtype=float).copy()
        if x.shape != (n,):
            raise DomainError(f"latent vector must have shape ({n},)")
        if np.any((x < 0) | (x > 1)):
            raise DomainError("latent values must lie in [0, 1]")
    prob = np.ascontiguousarray(W(x[:, None], x[None, :]), dtype=np.float64)
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    if use_numba:
        rows = np.zeros((n, num_words(n)), dtype=np.uint64)
        _fill_nb(prob, np.uint64(rng.stream_key(seed, rng.EDGE)), rows)
    else:
        rows = _fill_np(prob, seed)
    x.setflags(write=False)
    rows.setflags(write=False)
    return SampledGraph(n, rows, x, seed)


def degree_counts(G):
    return row_popcounts(G.bits)


def degree_sequence(G):
    """D_i = deg(i)/(n-1)."""
    if G.n < 2:
        raise DomainError("degree sequence needs n >= 2")
    return degree_counts(G) / (G.n - 1)


def edge_density(G):
    """t_inj(K2, G), i.e. the mean normalised degree."""
    if G.n < 2:
        raise DomainError("edge density needs n >= 2")
    return degree_counts(G).sum() / (G.n * (G.n - 1))
