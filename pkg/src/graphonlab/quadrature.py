"""Tensor Gauss-Legendre integration of edge-product integrands.

On the tensor rule with nodes ``x_a`` and weights ``w_a`` on [0, 1],

    ∫ ∏_{ij ∈ E} W(x_i, x_j) dx  ≈  Σ_{a_1..a_p} ∏_i w_{a_i} ∏_{ij} W(x_{a_i}, x_{a_j}),

which is a weighted homomorphism count into the complete graph on the nodes.
It is evaluated as an einsum contraction, so the cost is governed by the
motif's treewidth rather than by ``m ** p``.
"""

from __future__ import annotations

import string
import zlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import rng
from .errors import DomainError


@dataclass(frozen=True)
class QuadratureSpec:
    nodes_per_dim: int = 64
    mc_samples: int = 2_000_000
    mc_seed: int = 0x5EED
    dim_switch: int = 10
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.nodes_per_dim < 2:
            raise DomainError("nodes_per_dim must be >= 2")
        if self.mc_samples < 1:
            raise DomainError("mc_samples must be >= 1")


DEFAULT = QuadratureSpec()


@lru_cache(maxsize=64)
def _gl(m):
    x, w = np.polynomial.legendre.leggauss(m)
    return x, w


def gauss_legendre(m, a=0.0, b=1.0):
    """Nodes and weights of the m-point rule on [a, b]."""
    x, w = _gl(int(m))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def integrate_1d(f, a, b, m=64, pieces=1):
    """Composite Gauss-Legendre for a vectorised ``f`` on [a, b]."""
    edges = np.linspace(a, b, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(m, lo, hi)
        total += float(np.dot(w, f(x)))
    return total


def integrate_breaks(f, breaks, m=64):
    """Gauss-Legendre on each interval between consecutive sorted breakpoints."""
    pts = np.unique(np.asarray(breaks, dtype=float))
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi > lo:
            x, w = gauss_legendre(m, lo, hi)
            total += float(np.dot(w, f(x)))
    return total


_LETTERS = string.ascii_letters


def contract(
    p,
    edges,
    kernel,
    spec=DEFAULT,
    fixed=None,
    free=(),
    complement_edges=(),
):
    """Integrate ``∏_E W ∏_{E'} (1 - W)`` over the vertices that are neither fixed nor free.

    ``fixed`` maps a vertex to an array of ``B`` coordinates (a batch axis);
    ``free`` vertices stay as output axes evaluated at the rule's nodes.
    Output shape: ``(B,) * bool(fixed) + (m,) * len(free)``.
    Vertices are 1-indexed.  ``kernel`` is a vectorised W(x, y).
    """
    fixed = {int(v): np.atleast_1d(np.asarray(x, dtype=float)) for v, x in (fixed or {}).items()}
    free = tuple(int(v) for v in free)
    m = spec.nodes_per_dim
    nodes, weights = gauss_legendre(m)
    batch = None
    if fixed:
        sizes = {x.shape[0] for x in fixed.values()}
        if len(sizes) != 1:
            raise DomainError("fixed coordinate batches must share a length")
        batch = sizes.pop()
    if p > 50:
        raise DomainError("tensor contraction supports at most 50 vertices")
    letter = {v: _LETTERS[v - 1] for v in range(1, p + 1)}
    B = "Z"
    mat = None
    ops, subs = [], []

    def node_matrix():
        nonlocal mat
        if mat is None:
            mat = np.asarray(kernel(nodes[:, None], nodes[None, :]), dtype=float)
        return mat

    def factor(i, j, comp):
        fi, fj = i in fixed, j in fixed
        if fi and fj:
            val = np.asarray(kernel(fixed[i], fixed[j]), dtype=float) * np.ones(batch)
            s = B
        elif fi or fj:
            a, b = (i, j) if fi else (j, i)
            val = np.asarray(kernel(fixed[a][:, None], nodes[None, :]), dtype=float) * np.ones((batch, m))
            s = B + letter[b]
        else:
            val = node_matrix()
            s = letter[i] + letter[j]
        if comp:
            val = 1.0 - val
        ops.append(val)
        subs.append(s)

    for i, j in edges:
        factor(i, j, False)
    for i, j in complement_edges:
        factor(i, j, True)
    for v in range(1, p + 1):
        if v not in fixed and v not in free:
            ops.append(weights)
            subs.append(letter[v])
    for v in free:
        # a free vertex with no incident factor still needs its axis
        if not any(letter[v] in s for s in subs):
            ops.append(np.ones(m))
            subs.append(letter[v])
    if fixed and not any(B in s for s in subs):
        ops.append(np.ones(batch))
        subs.append(B)
    out = (B if fixed else "") + "".join(letter[v] for v in free)
    if not ops:
        return 1.0
    expr = ",".join(subs) + "->" + out
    return np.einsum(expr, *ops, optimize="greedy")


def monte_carlo(p, edges, kernel, spec=DEFAULT, complement_edges=(), tag=""):
    """Plain Monte Carlo estimate and its standard error.

    The stream is derived from ``(spec.mc_seed, tag)`` so a call site always
    sees the same draws.
    """
    gen = rng.generator(spec.mc_seed, zlib.crc32(tag.encode()))
    n = spec.mc_samples
    chunk = 200_000
    s1 = s2 = 0.0
    done = 0
    while done < n:
        b = min(chunk, n - done)
        x = gen.random((b, p))
        val = np.ones(b)
        for i, j in edges:
            val *= kernel(x[:, i - 1], x[:, j - 1])
        for i, j in complement_edges:
            val *= 1.0 - kernel(x[:, i - 1], x[:, j - 1])
        s1 += float(val.sum())
        s2 += float(np.dot(val, val))
        done += b
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return mean, (var / n) ** 0.5
