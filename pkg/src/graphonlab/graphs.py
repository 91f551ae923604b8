"""Finite simple graphs, distinct-character words and motif constructions.

Vertices are 1-indexed (``1..p``) and edges are stored as sorted pairs
``(i, j)`` with ``i < j``.  Words are plain tuples.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ExplosionGuardError, FamilyError, SizeError, WordError

SUPERGRAPH_CAP = 20


def _norm_edge(i, j):
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class SimpleGraph:
    num_vertices: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        p = int(self.num_vertices)
        if p < 0:
            raise SizeError(f"negative vertex count {p}")
        norm = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise DomainError(f"self-loop at vertex {i}")
            if not (1 <= i <= p and 1 <= j <= p):
                raise DomainError(f"edge {e} has an endpoint outside [1, {p}]")
            norm.add(_norm_edge(i, j))
        object.__setattr__(self, "num_vertices", p)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, p, edges=()):
        edges = list(edges)
        keys = [_norm_edge(*e) for e in edges]
        if len(set(keys)) != len(keys):
            raise DomainError("duplicate edge")
        return cls(p, frozenset(keys))

    @property
    def p(self):
        return self.num_vertices

    @property
    def e(self):
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def has_edge(self, i, j):
        return _norm_edge(i, j) in self.edges

    def neighbors(self, i):
        out = []
        for a, b in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)

    def non_edges(self):
        return [e for e in itertools.combinations(range(1, self.p + 1), 2) if e not in self.edges]

    def adjacency(self):
        """Dense 0-indexed boolean adjacency matrix."""
        a = np.zeros((self.p, self.p), dtype=bool)
        for i, j in self.edges:
            a[i - 1, j - 1] = a[j - 1, i - 1] = True
        return a

    def relabel(self, perm):
        """Image of the graph under vertex map ``v -> perm[v-1]``."""
        if sorted(perm) != list(range(1, self.p + 1)):
            raise DomainError("relabel needs a permutation of 1..p")
        return SimpleGraph(self.p, frozenset(_norm_edge(perm[i - 1], perm[j - 1]) for i, j in self.edges))

    def add_edges(self, extra):
        return SimpleGraph(self.p, self.edges | {_norm_edge(*e) for e in extra})

    def __repr__(self):
        return f"SimpleGraph(p={self.p}, edges={self.sorted_edges()})"

    # -- edge-list text format -------------------------------------------------

    def to_edgelist(self):
        lines = [f"{self.p} {self.e}"]
        lines += [f"{i} {j}" for i, j in self.sorted_edges()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text):
        rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not rows or len(rows[0]) != 2:
            raise DomainError("edge list must start with a 'p m' header")
        p, m = int(rows[0][0]), int(rows[0][1])
        body = rows[1:]
        if len(body) != m:
            raise DomainError(f"header announces {m} edges, found {len(body)}")
        return cls.from_edges(p, [(int(r[0]), int(r[1])) for r in body])


def complete(p):
    return SimpleGraph(p, frozenset(itertools.combinations(range(1, p + 1), 2)))


def empty(p):
    return SimpleGraph(p, frozenset())


def path(p):
    """Path on ``p`` vertices ``1 - 2 - ... - p``."""
    return SimpleGraph(p, frozenset((i, i + 1) for i in range(1, p)))


def cycle(p):
    if p < 3:
        raise SizeError("a cycle needs at least 3 vertices")
    return SimpleGraph(p, frozenset(_norm_edge(i, i % p + 1) for i in range(1, p + 1)))


def star(leaves):
    return SimpleGraph(leaves + 1, frozenset((1, j) for j in range(2, leaves + 2)))


_NAMED = re.compile(r"^([KPCES])(\d+)$")


def named_graph(name):
    """``K3``, ``P3``, ``C4``, ``E2`` (empty), ``S3`` (star with 3 leaves)."""
    m = _NAMED.match(name.strip().upper())
    if not m:
        raise DomainError(f"unknown graph name {name!r}")
    kind, p = m.group(1), int(m.group(2))
    return {"K": complete, "P": path, "C": cycle, "E": empty, "S": star}[kind](p)


def load_graph(spec):
    """A named graph or the path to an edge-list file."""
    try:
        return named_graph(spec)
    except DomainError:
        pass
    return SimpleGraph.from_edgelist(Path(spec).read_text())


# -- words --------------------------------------------------------------------


def check_word(word, n=None):
    """Validate a word of distinct characters, optionally over ``[n]``."""
    word = tuple(int(c) for c in word)
    if len(set(word)) != len(word):
        raise WordError(f"word {word} repeats a character")
    if n is not None and any(c < 1 or c > n for c in word):
        raise WordError(f"word {word} has a character outside [1, {n}]")
    return word


def num_words(n, k):
    """|S_{n,k}| = n!/(n-k)!."""
    if k > n:
        return 0
    return math.perm(n, k)


def enumerate_words(n, k):
    """Lazily yield S_{n,k} in lexicographic order."""
    if k > n or k < 0:
        raise DomainError(f"no words of length {k} over [{n}]")
    return itertools.permutations(range(1, n + 1), k)


def substitute(word, i, q):
    """R_i(word, q): replace the i-th (1-indexed) character by ``q``."""
    word = tuple(word)
    if not 1 <= i <= len(word):
        raise IndexError(f"position {i} outside word of length {len(word)}")
    return word[: i - 1] + (q,) + word[i:]


# -- motifs -------------------------------------------------------------------


@dataclass(frozen=True)
class LabeledMotif:
    graph: SimpleGraph
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", check_word(self.labels, self.graph.p))

    @property
    def p(self):
        return self.graph.p

    @property
    def k(self):
        return len(self.labels)

    @property
    def unlabeled(self):
        lab = set(self.labels)
        return [v for v in range(1, self.p + 1) if v not in lab]

    def labeled_edges(self):
        """E(F^[l]) as pairs of label *positions* (0-indexed into ``labels``)."""
        pos = {v: a for a, v in enumerate(self.labels)}
        out = []
        for i, j in self.graph.sorted_edges():
            if i in pos and j in pos:
                a, b = pos[i], pos[j]
                out.append((min(a, b), max(a, b)))
        return sorted(out)

    def labeled_subgraph(self):
        """F^[l] as a graph on label positions 1..k."""
        return SimpleGraph(self.k, frozenset((a + 1, b + 1) for a, b in self.labeled_edges()))

    def free_edges(self):
        """E(F) minus E(F^[l]) (edges with at least one unlabeled endpoint)."""
        lab = set(self.labels)
        return [e for e in self.graph.sorted_edges() if not (e[0] in lab and e[1] in lab)]

    def with_extra_label(self, q):
        return LabeledMotif(self.graph, self.labels + (q,))

    def relabel_labels(self, positions):
        """Motif F^{l_beta} keeping only the labels at the given 0-indexed positions."""
        return LabeledMotif(self.graph, tuple(self.labels[a] for a in positions))


@dataclass(frozen=True)
class MotifFamily:
    motifs: tuple

    def __post_init__(self):
        motifs = tuple(self.motifs)
        if not motifs:
            raise FamilyError("empty motif family")
        object.__setattr__(self, "motifs", motifs)
        p0, l0, e0 = motifs[0].p, motifs[0].labels, motifs[0].labeled_edges()
        for m in motifs[1:]:
            if m.p != p0 or m.labels != l0:
                raise FamilyError("family motifs must share vertex count and label word")
            if m.labeled_edges() != e0:
                raise FamilyError("motifs disagree on the edges among labeled vertices")

    @classmethod
    def single(cls, graph, labels=()):
        return cls((LabeledMotif(graph, tuple(labels)),))

    @classmethod
    def of(cls, graphs, labels=()):
        return cls(tuple(LabeledMotif(g, tuple(labels)) for g in graphs))

    @property
    def d(self):
        return len(self.motifs)

    @property
    def p(self):
        return self.motifs[0].p

    @property
    def labels(self):
        return self.motifs[0].labels

    @property
    def k(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.motifs)

    def __len__(self):
        return len(self.motifs)


def pad_isolated(motif, target_p, extra_labels=0):
    """Append isolated vertices up to ``target_p``; label the first ``extra_labels`` of them."""
    p = motif.p
    if target_p < p:
        raise SizeError(f"cannot pad a {p}-vertex motif down to {target_p}")
    if extra_labels < 0 or extra_labels > target_p - p:
        raise SizeError(f"{extra_labels} extra labels but only {target_p - p} new vertices")
    g = SimpleGraph(target_p, motif.graph.edges)
    return LabeledMotif(g, motif.labels + tuple(range(p + 1, p + 1 + extra_labels)))


def join(f, g, q, q2):
    """(F ⋈ F')(q, q'): disjoint union with vertex q of F glued to q' of F'."""
    p, p2 = f.p, g.p
    if not 1 <= q <= p:
        raise IndexError(f"vertex {q} not in F (p={p})")
    if not 1 <= q2 <= p2:
        raise IndexError(f"vertex {q2} not in F' (p={p2})")
    new = {}
    nxt = p + 1
    for v in range(1, p2 + 1):
        if v == q2:
            new[v] = q
        else:
            new[v] = nxt
            nxt += 1
    edges = set(f.edges)
    edges |= {_norm_edge(new[i], new[j]) for i, j in g.edges}
    return SimpleGraph(p + p2 - 1, frozenset(edges))


def supergraphs(f, cap=SUPERGRAPH_CAP):
    """All F' >= F on the same vertex set, paired with e(F') - e(F)."""
    missing = f.non_edges()
    if len(missing) > cap:
        raise ExplosionGuardError(f"{len(missing)} missing edges exceeds the cap of {cap}")
    out = []
    for mask in range(1 << len(missing)):
        extra = [missing[b] for b in range(len(missing)) if mask >> b & 1]
        out.append((f.add_edges(extra), len(extra)))
    return out
