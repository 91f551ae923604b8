"""Exact homomorphism counting on finite graphs.

Counting is backtracking over motif vertices in a connectivity-aware order.
Candidate images for the next motif vertex are a bitset: the AND of the
host rows of already-placed motif neighbours (and, for induced maps, of the
complements of rows of placed non-neighbours), minus used host vertices for
injective maps.  The last level is counted by popcount instead of being
enumerated.

Two interchangeable kernels implement this: a numba kernel on packed uint64
rows and an interpreter kernel on Python-int rows.  ``GRAPHONLAB_NUMBA=0``
selects the latter.  :func:`oracle_densities` is an independent unpruned
enumeration used as ground truth in tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _accel
from ._accel import jit
from .bitset import pack_rows, pop_lowest, popcount_row, rows_to_ints
from .errors import ExplosionGuardError, SizeError, WordError
from .graphs import LabeledMotif, SimpleGraph, check_word

HOM, INJ, IND = 0, 1, 2
_MODES = {"hom": HOM, "inj": INJ, "ind": IND}


# -- host adapter -------------------------------------------------------------


class Host:
    """Packed rows of a host graph, built once per graph."""

    __slots__ = ("n", "rows", "_ints")

    def __init__(self, n, rows):
        self.n = int(n)
        self.rows = np.ascontiguousarray(rows, dtype=np.uint64)
        self._ints = None

    @property
    def ints(self):
        if self._ints is None:
            self._ints = rows_to_ints(self.rows)
        return self._ints

    def has_edge(self, i, j):
        """0-indexed adjacency test."""
        return bool((int(self.rows[i, j >> 6]) >> (j & 63)) & 1)


def as_host(g):
    if isinstance(g, Host):
        return g
    bits = getattr(g, "bits", None)
    if bits is not None:
        return Host(g.n, bits)
    if isinstance(g, SimpleGraph):
        return Host(g.p, pack_rows(g.adjacency()))
    raise TypeError(f"cannot count into {type(g).__name__}")


# -- motif plan ---------------------------------------------------------------


@dataclass(frozen=True)
class Plan:
    """Static vertex order and back-constraint masks for one labeled motif."""

    order: tuple
    k: int
    adj_mask: np.ndarray
    non_mask: np.ndarray
    label_pairs: np.ndarray

    @property
    def p(self):
        return len(self.order)


def make_plan(graph, labels=()):
    """Labeled vertices first (in label order), then a greedy connected order.

    Constraints between two labeled positions are left out of the masks; they
    form the 0/1 factor over the labels and are reported separately.
    """
    labels = tuple(labels)
    p = graph.p
    order = list(labels)
    rest = [v for v in range(1, p + 1) if v not in labels]
    deg = {v: len(graph.neighbors(v)) for v in range(1, p + 1)}
    while rest:
        placed = set(order)
        best = max(rest, key=lambda v: (sum(graph.has_edge(v, u) for u in placed), deg[v], -v))
        order.append(best)
        rest.remove(best)
    k = len(labels)
    adj = np.zeros(p, dtype=np.int64)
    non = np.zeros(p, dtype=np.int64)
    for t in range(p):
        for s in range(t):
            if s < k and t < k:
                continue
            if graph.has_edge(order[s], order[t]):
                adj[t] |= 1 << s
            else:
                non[t] |= 1 << s
    pairs = [(s, t) for t in range(k) for s in range(t) if graph.has_edge(order[s], order[t])]
    lp = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return Plan(tuple(order), k, adj, non, lp)


# -- numba kernel -------------------------------------------------------------


@jit
def _build(rows, full, work, used, img, t, adj_mask, non_mask, injective, induced):
    nw = full.shape[0]
    for w in range(nw):
        work[t, w] = full[w]
    am = adj_mask[t]
    nm = non_mask[t]
    for s in range(t):
        v = img[s]
        if (am >> s) & 1:
            for w in range(nw):
                work[t, w] &= rows[v, w]
        elif induced and (nm >> s) & 1:
            for w in range(nw):
                work[t, w] &= ~rows[v, w]
    if injective:
        for w in range(nw):
            work[t, w] &= ~used[w]


@jit
def _count_nb(rows, full, p, k, fixed, adj_mask, non_mask, injective, induced):
    """Completions of the fixed images of positions 0..k-1 to all p positions."""
    if k >= p:
        return np.int64(1)
    nw = full.shape[0]
    img = np.zeros(p, dtype=np.int64)
    used = np.zeros(nw, dtype=np.uint64)
    chosen = np.zeros(p, dtype=np.bool_)
    work = np.zeros((p, nw), dtype=np.uint64)
    for s in range(k):
        img[s] = fixed[s]
        used[fixed[s] >> 6] |= np.uint64(1) << np.uint64(fixed[s] & 63)
    total = np.int64(0)
    t = k
    _build(rows, full, work, used, img, t, adj_mask, non_mask, injective, induced)
    while t >= k:
        if t == p - 1:
            total += popcount_row(work[t])
            t -= 1
            continue
        if chosen[t]:
            v = img[t]
            used[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
            chosen[t] = False
        v = pop_lowest(work[t])
        if v < 0:
            t -= 1
            continue
        img[t] = v
        chosen[t] = True
        used[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        t += 1
        _build(rows, full, work, used, img, t, adj_mask, non_mask, injective, induced)
    return total


@jit
def _all_roots_nb(rows, full, n, p, k, adj_mask, non_mask, injective, induced, label_pairs, out_cnt, out_hat):
    """Counts for every root word of length k, in lexicographic order."""
    alpha = np.zeros(max(k, 1), dtype=np.int64)
    idx = 0
    total = 1
    for _ in range(k):
        total *= n
    for code in range(total):
        c = code
        for a in range(k - 1, -1, -1):
            alpha[a] = c % n
            c //= n
        ok = True
        for a in range(k):
            for b in range(a):
                if alpha[a] == alpha[b]:
                    ok = False
        if not ok:
            continue
        hat = 1
        for r in range(label_pairs.shape[0]):
            u = alpha[label_pairs[r, 0]]
            v = alpha[label_pairs[r, 1]]
            if not ((rows[u, v >> 6] >> np.uint64(v & 63)) & np.uint64(1)):
                hat = 0
        out_hat[idx] = hat
        out_cnt[idx] = _count_nb(rows, full, p, k, alpha, adj_mask, non_mask, injective, induced)
        idx += 1


def _full_mask_words(n):
    nw = num_words_host(n)
    full = np.full(nw, np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
    rem = n - 64 * (nw - 1)
    if rem < 64:
        full[-1] = np.uint64((1 << rem) - 1)
    return full


def num_words_host(n):
    return max(1, (n + 63) // 64)


# -- interpreter kernel -------------------------------------------------------


def _count_py(rows, n, p, k, fixed, adj_mask, non_mask, injective, induced):
    if k >= p:
        return 1
    full = (1 << n) - 1
    img = list(fixed) + [0] * (p - k)
    used = 0
    for v in fixed:
        used |= 1 << v
    adj_mask = [int(m) for m in adj_mask]
    non_mask = [int(m) for m in non_mask]

    def cands(t, used):
        c = full
        am, nm = adj_mask[t], non_mask[t]
        for s in range(t):
            if am >> s & 1:
                c &= rows[img[s]]
            elif induced and nm >> s & 1:
                c &= ~rows[img[s]]
        if injective:
            c &= ~used
        return c

    def rec(t, used):
        c = cands(t, used)
        if t == p - 1:
            return c.bit_count()
        total = 0
        while c:
            low = c & -c
            v = low.bit_length() - 1
            c ^= low
            img[t] = v
            total += rec(t + 1, used | low)
        return total

    return rec(k, used)


def _all_roots_py(ints, n, plan, injective, induced):
    cnt, hat = [], []
    for alpha in itertools.permutations(range(n), plan.k):
        h = 1
        for s, t in plan.label_pairs:
            if not (ints[alpha[s]] >> alpha[t]) & 1:
                h = 0
                break
        hat.append(h)
        cnt.append(_count_py(ints, n, plan.p, plan.k, alpha, plan.adj_mask, plan.non_mask, injective, induced))
    return cnt, hat


# -- dispatch -----------------------------------------------------------------


def _flags(mode):
    m = _MODES[mode] if isinstance(mode, str) else mode
    return m != HOM, m == IND


def count_from(host, plan, fixed, mode="inj", use_numba=None):
    """Number of completions of ``fixed`` (0-indexed host vertices) to the whole motif."""
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    injective, induced = _flags(mode)
    if use_numba:
        fx = np.asarray(fixed, dtype=np.int64).reshape(-1)
        if fx.size == 0:
            fx = np.zeros(1, dtype=np.int64)
        return int(
            _count_nb(host.rows, _full_mask_words(host.n), plan.p, plan.k, fx,
                      plan.adj_mask, plan.non_mask, injective, induced)
        )
    return _count_py(host.ints, host.n, plan.p, plan.k, tuple(fixed), plan.adj_mask, plan.non_mask, injective, induced)


def all_root_counts(host, plan, mode="inj", use_numba=None):
    """``(counts, hat)`` over every root word of length ``plan.k``, lexicographic.

    ``counts`` ignore the edges among labeled vertices; ``hat`` is their 0/1 indicator.
    """
    use_numba = _accel.USE_NUMBA if use_numba is None else use_numba
    injective, induced = _flags(mode)
    n = host.n
    size = math.perm(n, plan.k)
    if use_numba:
        cnt = np.zeros(size, dtype=np.int64)
        hat = np.zeros(size, dtype=np.uint8)
        _all_roots_nb(host.rows, _full_mask_words(n), n, plan.p, plan.k, plan.adj_mask, plan.non_mask,
                      injective, induced, plan.label_pairs, cnt, hat)
        return cnt, hat
    cnt, hat = _all_roots_py(host.ints, n, plan, injective, induced)
    return np.array(cnt, dtype=np.int64), np.array(hat, dtype=np.uint8)


def hom_count(f, g, mode="inj", use_numba=None):
    """|Hom(F,G)|, |Inj(F,G)| or |Ind(F,G)| as a Python int."""
    host = as_host(g)
    n, p = host.n, f.p
    if p == 0:
        return 1
    if mode != "hom" and n < p:
        return 0
    plan = make_plan(f, labels=(_first_vertex(f),))
    cnt, _ = all_root_counts(host, plan, mode, use_numba)
    return sum(int(c) for c in cnt)


def _first_vertex(f):
    # highest-degree vertex first keeps the candidate sets small
    return max(range(1, f.p + 1), key=lambda v: (len(f.neighbors(v)), -v))


def _check_sizes(f, host):
    if host.n < f.p:
        raise SizeError(f"host has {host.n} vertices, motif needs {f.p}")


def t_hom(f, g, use_numba=None):
    host = as_host(g)
    return hom_count(f, host, "hom", use_numba) / host.n ** f.p


def t_inj(f, g, use_numba=None):
    host = as_host(g)
    _check_sizes(f, host)
    return hom_count(f, host, "inj", use_numba) / math.perm(host.n, f.p)


def t_ind(f, g, use_numba=None):
    host = as_host(g)
    _check_sizes(f, host)
    return hom_count(f, host, "ind", use_numba) / math.perm(host.n, f.p)


@dataclass(frozen=True)
class RootedCount:
    motif: LabeledMotif
    root: tuple
    hat: int
    tilde_count: int
    denom: int

    @property
    def inj_count(self):
        return self.hat * self.tilde_count

    @property
    def density(self):
        return self.inj_count / self.denom

    @property
    def tilde_density(self):
        return self.tilde_count / self.denom

    def exact(self):
        return Fraction(self.inj_count, self.denom)


def t_inj_rooted(motif, g, alpha, use_numba=None):
    """t_inj(F^l, G^alpha) with its hat/tilde factorisation; ``alpha`` is 1-indexed."""
    host = as_host(g)
    _check_sizes(motif.graph, host)
    alpha = check_word(alpha, host.n)
    if len(alpha) != motif.k:
        raise WordError(f"root word has length {len(alpha)}, motif has {motif.k} labels")
    plan = make_plan(motif.graph, motif.labels)
    fixed = [a - 1 for a in alpha]
    hat = int(all(host.has_edge(fixed[s], fixed[t]) for s, t in plan.label_pairs))
    tilde = count_from(host, plan, fixed, "inj", use_numba)
    return RootedCount(motif, alpha, hat, tilde, math.perm(host.n - motif.k, motif.p - motif.k))


def rooted_densities(motif, g, use_numba=None):
    """Arrays ``(hat, tilde_density)`` over all of S_{n,k} in lexicographic order."""
    host = as_host(g)
    _check_sizes(motif.graph, host)
    plan = make_plan(motif.graph, motif.labels)
    cnt, hat = all_root_counts(host, plan, "inj", use_numba)
    denom = math.perm(host.n - motif.k, motif.p - motif.k)
    return hat.astype(np.float64), cnt / denom


def rooted_counts(motif, g, use_numba=None):
    """Integer ``(hat, tilde_count)`` arrays over S_{n,k} and the common denominator."""
    host = as_host(g)
    _check_sizes(motif.graph, host)
    plan = make_plan(motif.graph, motif.labels)
    cnt, hat = all_root_counts(host, plan, "inj", use_numba)
    return hat, cnt, math.perm(host.n - motif.k, motif.p - motif.k)


# -- brute-force oracle -------------------------------------------------------

ORACLE_MAX_P = 5
ORACLE_MAX_N = 9


def _dense(g):
    if isinstance(g, SimpleGraph):
        return g.p, g.adjacency()
    from .bitset import unpack_rows

    return g.n, unpack_rows(as_host(g).rows, g.n)


def oracle_counts(f, g):
    """(|Hom|, |Inj|, |Ind|) by iterating every map V(F) -> V(G)."""
    n, gadj = _dense(g)
    p = f.p
    if p > ORACLE_MAX_P or n > ORACLE_MAX_N:
        raise ExplosionGuardError(f"oracle limited to v(F) <= {ORACLE_MAX_P}, v(G) <= {ORACLE_MAX_N}")
    fe = [(i - 1, j - 1) for i, j in f.sorted_edges()]
    fn = [(i - 1, j - 1) for i, j in f.non_edges()]
    hom = inj = ind = 0
    for phi in itertools.product(range(n), repeat=p):
        if all(gadj[phi[i], phi[j]] for i, j in fe):
            hom += 1
            if len(set(phi)) == p:
                inj += 1
                if not any(gadj[phi[i], phi[j]] for i, j in fn):
                    ind += 1
    return hom, inj, ind


def oracle_densities(f, g):
    n = g.p if isinstance(g, SimpleGraph) else g.n
    hom, inj, ind = oracle_counts(f, g)
    a = math.perm(n, f.p)
    if a == 0:
        return hom / n ** f.p, 0.0, 0.0
    return hom / n ** f.p, inj / a, ind / a


def oracle_rooted_count(motif, g, alpha):
    """|Inj(F^l, G^alpha)| by enumerating all injective maps."""
    n, gadj = _dense(g)
    fe = [(i - 1, j - 1) for i, j in motif.graph.sorted_edges()]
    lab = [v - 1 for v in motif.labels]
    c = 0
    for phi in itertools.permutations(range(n), motif.p):
        if any(phi[lab[a]] != alpha[a] - 1 for a in range(len(lab))):
            continue
        if all(gadj[phi[i], phi[j]] for i, j in fe):
            c += 1
    return c
