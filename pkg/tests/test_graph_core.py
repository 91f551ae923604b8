import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphonlab import bitset, rng
from graphonlab.errors import (
    DomainError,
    ExplosionGuardError,
    FamilyError,
    SizeError,
    WordError,
)
from graphonlab.graphs import (
    LabeledMotif,
    MotifFamily,
    SimpleGraph,
    check_word,
    complete,
    cycle,
    empty,
    enumerate_words,
    join,
    named_graph,
    pad_isolated,
    path,
    substitute,
    supergraphs,
)
from graphonlab.hom import oracle_rooted_count, t_inj_rooted
from graphonlab.quadrature import QuadratureSpec, contract, gauss_legendre, integrate_1d, monte_carlo


def random_graph(p, density, r):
    return SimpleGraph(p, frozenset((i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)
                                    if r.random() < density))


# -- SimpleGraph --------------------------------------------------------------


def test_simple_graph_normalises_and_validates():
    g = SimpleGraph(3, frozenset({(2, 1), (3, 2)}))
    assert g.sorted_edges() == [(1, 2), (2, 3)]
    with pytest.raises(DomainError):
        SimpleGraph(3, frozenset({(1, 1)}))
    with pytest.raises(DomainError):
        SimpleGraph(3, frozenset({(1, 4)}))
    with pytest.raises(DomainError):
        SimpleGraph.from_edges(3, [(1, 2), (2, 1)])


def test_edgelist_round_trip():
    g = cycle(5)
    text = g.to_edgelist()
    assert text.splitlines()[0] == "5 5"
    assert SimpleGraph.from_edgelist(text) == g


def test_named_graphs():
    assert named_graph("K3").e == 3
    assert named_graph("P3").e == 2
    assert named_graph("C4").e == 4
    assert named_graph("E2").e == 0
    assert named_graph("S3").p == 4
    with pytest.raises(DomainError):
        named_graph("Q7")


# -- pad_isolated -------------------------------------------------------------


def test_pad_isolated_examples():
    m = LabeledMotif(complete(2), (1,))
    padded = pad_isolated(m, 3, 0)
    assert padded.p == 3 and padded.graph.sorted_edges() == [(1, 2)] and padded.labels == (1,)
    assert pad_isolated(m, 2, 0) == m
    with pytest.raises(SizeError):
        pad_isolated(m, 1)
    with pytest.raises(SizeError):
        pad_isolated(m, 3, 2)


def test_pad_isolated_unlabeled_is_exact_on_c5():
    G = cycle(5)
    base = LabeledMotif(complete(2), (1,))
    padded = pad_isolated(base, 4, 0)
    for a in range(1, 6):
        assert t_inj_rooted(padded, G, (a,)).exact() == t_inj_rooted(base, G, (a,)).exact() == Fraction(1, 2)


def test_pad_isolated_labeled_on_c5():
    # a labeled isolated vertex occupies one image, so equality holds only on average over alpha'
    G = cycle(5)
    base = LabeledMotif(complete(2), (1,))
    padded = pad_isolated(base, 3, 1)
    for a in range(1, 6):
        vals = []
        for a2 in range(1, 6):
            if a2 == a:
                continue
            v = t_inj_rooted(padded, G, (a, a2)).exact()
            neighbour = a2 in (a % 5 + 1, (a - 2) % 5 + 1)
            assert v == (Fraction(1, 3) if neighbour else Fraction(2, 3))
            assert v == Fraction(oracle_rooted_count(padded, G, (a, a2)), 3)
            vals.append(v)
        assert sum(vals) / len(vals) == t_inj_rooted(base, G, (a,)).exact()


# -- join ---------------------------------------------------------------------


def test_join_examples():
    j = join(complete(2), complete(2), 1, 1)
    assert j.p == 3 and j.sorted_edges() == [(1, 2), (1, 3)]
    j2 = join(complete(2), complete(2), 2, 2)
    assert j2.p == 3 and sorted(len(j2.neighbors(v)) for v in (1, 2, 3)) == [1, 1, 2]
    j3 = join(complete(3), complete(2), 1, 1)
    assert j3.p == 4 and j3.e == 4
    with pytest.raises(IndexError):
        join(complete(2), complete(2), 3, 1)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10**6))
def test_join_vertex_count(p1, p2, s):
    r = random.Random(s)
    f, g = random_graph(p1, 0.5, r), random_graph(p2, 0.5, r)
    q, q2 = r.randint(1, p1), r.randint(1, p2)
    j = join(f, g, q, q2)
    assert j.p == p1 + p2 - 1
    assert j.e == f.e + g.e  # gluing a single vertex creates no parallel edges


# -- supergraphs --------------------------------------------------------------


def test_supergraph_examples():
    assert [g for g, _ in supergraphs(complete(3))] == [complete(3)]
    sup = supergraphs(path(3))
    assert len(sup) == 2 and {g.e for g, _ in sup} == {2, 3}
    assert len(supergraphs(empty(3))) == 8
    with pytest.raises(ExplosionGuardError):
        supergraphs(empty(8))  # 28 missing edges


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_supergraphs_contain_self_and_complete(p, s):
    f = random_graph(p, 0.5, random.Random(s))
    sup = supergraphs(f)
    graphs = [g for g, _ in sup]
    assert f in graphs and complete(p) in graphs
    assert len(sup) == 2 ** (p * (p - 1) // 2 - f.e)
    assert all(g.e - f.e == k and f.edges <= g.edges for g, k in sup)


# -- words --------------------------------------------------------------------


def test_substitute_examples():
    assert substitute(("a", "b", "c"), 1, "x") == ("x", "b", "c")
    assert substitute(("a", "b", "c"), 3, "c") == ("a", "b", "c")
    assert substitute((0.1, 0.7), 2, 0.4) == (0.1, 0.4)
    with pytest.raises(IndexError):
        substitute((1, 2), 3, 0)


def test_enumerate_words_examples():
    assert list(enumerate_words(3, 1)) == [(1,), (2,), (3,)]
    assert len(list(enumerate_words(3, 2))) == 6
    w = list(enumerate_words(4, 3))
    assert len(w) == 24 and len(set(w)) == 24 and w == sorted(w)
    with pytest.raises(DomainError):
        list(enumerate_words(2, 3))


def test_check_word():
    assert check_word("132") == (1, 3, 2)
    with pytest.raises(WordError):
        check_word((1, 1))
    with pytest.raises(WordError):
        check_word((1, 4), n=3)


@pytest.mark.parametrize("n,p,k", [(4, 3, 1), (5, 3, 2), (6, 4, 2), (5, 2, 2)])
def test_word_average_identity(n, p, k):
    # averaging f(beta_l) over S_{n,p} equals averaging f(alpha) over S_{n,k}
    r = random.Random(n * 100 + p * 10 + k)
    f = {a: Fraction(r.randint(-50, 50)) for a in enumerate_words(n, k)}
    lab = tuple(r.sample(range(1, p + 1), k))
    betas = list(enumerate_words(n, p))
    lhs = sum(f[tuple(b[c - 1] for c in lab)] for b in betas) / len(betas)
    rhs = sum(f.values()) / math.perm(n, k)
    assert lhs == rhs


# -- motifs -------------------------------------------------------------------


def test_labeled_subgraph():
    m = LabeledMotif(complete(3), (3, 1))
    assert m.labeled_edges() == [(0, 1)]
    assert m.labeled_subgraph().e == 1
    assert m.unlabeled == [2]


def test_family_requires_common_labeled_subgraph():
    MotifFamily.of([complete(3), path(3)], (1,))
    with pytest.raises(FamilyError):
        MotifFamily.of([complete(3), path(3)], (1, 3))  # {1,3} is an edge of K3 only
    with pytest.raises(FamilyError):
        MotifFamily.of([complete(2), path(3)], (1,))


def test_oracle_rooted_count_accepts_sampled_hosts():
    from graphonlab import affine, sample

    G = sample(affine(), 7, 3)
    m = LabeledMotif(path(3), (2,))
    for a in range(1, 8):
        assert oracle_rooted_count(m, G, (a,)) == t_inj_rooted(m, G, (a,)).inj_count


# -- rng ----------------------------------------------------------------------


def test_rng_paths_agree():
    a = np.arange(50, dtype=np.uint64)
    b = (a * 7 + 3) % 50
    vec = rng.uniform_np(123, rng.EDGE, a, b)
    scalar = [rng.uniform(123, rng.EDGE, int(x), int(y)) for x, y in zip(a, b)]
    key = rng.stream_key(123, rng.EDGE)
    nb = [rng.uniform_nb(np.uint64(key), int(x), int(y)) for x, y in zip(a, b)]
    assert vec.tolist() == scalar == nb
    assert np.all((vec >= 0) & (vec < 1))


def test_rng_uniformity_and_seed_derivation():
    u = rng.uniform_np(7, rng.LATENT, np.arange(200_000, dtype=np.uint64), np.zeros(200_000, dtype=np.uint64))
    from scipy import stats

    assert stats.kstest(u, "uniform").pvalue > 1e-3
    seeds = {rng.derive_seed(1, n, r) for n in (10, 20) for r in range(1000)}
    assert len(seeds) == 2000
    assert rng.derive_seed(1, 2, 3) == rng.derive_seed(1, 2, 3)
    g1, g2 = rng.generator(5, 1), rng.generator(5, 1)
    assert g1.random() == g2.random()


# -- bitset -------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 150), st.integers(0, 10**6))
def test_bitset_round_trip(n, s):
    r = np.random.default_rng(s)
    dense = r.random((n, n)) < 0.3
    rows = bitset.pack_rows(dense)
    assert rows.shape == (n, bitset.num_words(n))
    assert np.array_equal(bitset.unpack_rows(rows, n), dense)
    assert np.array_equal(bitset.row_popcounts(rows), dense.sum(1))


# -- quadrature ---------------------------------------------------------------


def test_gauss_legendre_polynomials():
    x, w = gauss_legendre(8)
    assert abs(w.sum() - 1) < 1e-15
    for k in range(16):
        assert abs(np.dot(w, x**k) - 1 / (k + 1)) < 1e-14
    assert abs(integrate_1d(np.sin, 0, math.pi, m=32) - 2) < 1e-13


def test_contract_and_monte_carlo_agree_on_triangle():
    kern = lambda x, y: (x + y) / 2  # noqa: E731
    edges = [(1, 2), (2, 3), (1, 3)]
    exact = contract(3, edges, kern, QuadratureSpec())
    import sympy

    xs = sympy.symbols("x y z")
    sym = sympy.integrate((xs[0] + xs[1]) * (xs[1] + xs[2]) * (xs[0] + xs[2]) / 8,
                          (xs[0], 0, 1), (xs[1], 0, 1), (xs[2], 0, 1))
    assert abs(float(exact) - float(sym)) < 1e-14
    mc, se = monte_carlo(3, edges, kern, QuadratureSpec(mc_samples=200_000))
    assert 0 < se < 1e-3
    assert abs(mc - float(sym)) < 4 * se
