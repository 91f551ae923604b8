import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphonlab import affine, sample
from graphonlab.errors import ExplosionGuardError, SizeError, WordError
from graphonlab.graphs import LabeledMotif, SimpleGraph, complete, cycle, empty, named_graph, path, supergraphs
from graphonlab.hom import (
    hom_count,
    oracle_counts,
    oracle_densities,
    oracle_rooted_count,
    rooted_counts,
    t_hom,
    t_ind,
    t_inj,
    t_inj_rooted,
)
from graphonlab.sampler import degree_sequence


def random_graph(p, density, r):
    return SimpleGraph(p, frozenset((i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)
                                    if r.random() < density))


def test_t_hom_examples():
    assert t_hom(complete(2), complete(3)) == pytest.approx(2 / 3, abs=0)
    assert t_hom(complete(2), complete(2)) == 0.5
    assert t_hom(empty(2), cycle(5)) == 1.0


def test_t_inj_examples():
    assert t_inj(complete(2), complete(3)) == 1.0
    assert t_inj(complete(3), cycle(5)) == 0.0
    assert hom_count(path(3), cycle(5), "inj") == 10
    assert t_inj(path(3), cycle(5)) == pytest.approx(1 / 6)
    with pytest.raises(SizeError):
        t_inj(complete(3), complete(2))


def test_p3_in_c5_brute_force():
    # enumeration gives 10 maps out of 60, so 1/6 (not 1/3)
    maps = [phi for phi in itertools.permutations(range(5), 3)
            if all(abs(phi[a] - phi[b]) in (1, 4) for a, b in ((0, 1), (1, 2)))]
    assert len(maps) == 10
    assert Fraction(len(maps), 60) == Fraction(1, 6)
    assert oracle_densities(path(3), cycle(5))[1] == pytest.approx(1 / 6)


def test_t_ind_examples():
    assert t_ind(complete(2), complete(3)) == 1.0
    assert t_ind(empty(2), complete(3)) == 0.0
    assert t_ind(path(3), complete(3)) == 0.0


def test_oracle_examples():
    assert oracle_densities(complete(2), complete(3)) == pytest.approx((2 / 3, 1, 1))
    assert oracle_densities(complete(3), complete(3)) == pytest.approx((6 / 27, 1, 1))
    assert oracle_densities(complete(2), empty(3)) == (0, 0, 0)
    with pytest.raises(ExplosionGuardError):
        oracle_counts(complete(2), empty(10))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 8), st.floats(0.1, 0.9), st.integers(0, 10**6))
def test_counts_match_oracle(p, n, dens, s):
    r = random.Random(s)
    F, G = random_graph(p, dens, r), random_graph(n, dens, r)
    hom, inj, ind = oracle_counts(F, G)
    assert hom_count(F, G, "hom") == hom
    assert hom_count(F, G, "inj") == inj
    assert hom_count(F, G, "ind") == ind
    assert hom_count(F, G, "inj", use_numba=False) == inj
    assert hom_count(F, G, "ind", use_numba=False) == ind
    assert hom_count(F, G, "hom", use_numba=False) == hom


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(4, 7), st.integers(0, 10**6))
def test_rooted_counts_match_oracle(p, n, s):
    r = random.Random(s)
    F, G = random_graph(p, 0.6, r), random_graph(n, 0.6, r)
    k = r.randint(1, min(2, p))
    m = LabeledMotif(F, tuple(r.sample(range(1, p + 1), k)))
    alpha = tuple(r.sample(range(1, n + 1), k))
    rc = t_inj_rooted(m, G, alpha)
    assert rc.inj_count == oracle_rooted_count(m, G, alpha)
    assert rc.hat in (0, 1)
    assert rc.denom == math.perm(n - k, p - k)


def test_inj_ind_supergraph_inversion():
    r = random.Random(4)
    for _ in range(20):
        p = r.randint(2, 4)
        F, G = random_graph(p, 0.4, r), random_graph(7, 0.5, r)
        inj = Fraction(hom_count(F, G, "inj"))
        assert inj == sum(Fraction(hom_count(S, G, "ind")) for S, _ in supergraphs(F))
        ind = Fraction(hom_count(F, G, "ind"))
        assert ind == sum((-1) ** k * Fraction(hom_count(S, G, "inj")) for S, k in supergraphs(F))


def test_hom_inj_bound():
    r = random.Random(5)
    for _ in range(30):
        p = r.randint(1, 4)
        n = r.randint(p, 9)
        F, G = random_graph(p, 0.5, r), random_graph(n, 0.5, r)
        assert abs(t_inj(F, G) - t_hom(F, G)) <= math.comb(p, 2) / n + 1e-15


def test_isomorphism_invariance():
    r = random.Random(6)
    for _ in range(20):
        F, G = random_graph(4, 0.5, r), random_graph(8, 0.5, r)
        perm = list(range(1, 5))
        r.shuffle(perm)
        F2 = F.relabel(perm)
        for mode in ("hom", "inj", "ind"):
            assert hom_count(F, G, mode) == hom_count(F2, G, mode)


def test_rooted_examples():
    G = sample(affine(), 30, 9)
    deg = degree_sequence(G)
    m1 = LabeledMotif(complete(2), (1,))
    for i in range(1, 31):
        assert t_inj_rooted(m1, G, (i,)).density == deg[i - 1]
    m2 = LabeledMotif(complete(2), (1, 2))
    for i, j in [(1, 2), (3, 7), (10, 4)]:
        rc = t_inj_rooted(m2, G, (i, j))
        assert rc.density == float(G.has_edge(i - 1, j - 1))
    with pytest.raises(WordError):
        t_inj_rooted(m2, G, (1, 1))
    with pytest.raises(WordError):
        t_inj_rooted(m2, G, (1, 31))


@pytest.mark.parametrize("name,labels", [("K2", (1,)), ("P3", (2,)), ("K3", (1, 2)), ("P3", (1, 3))])
def test_rooted_average_identity(name, labels):
    F = named_graph(name)
    G = sample(affine(), 25, 17)
    m = LabeledMotif(F, labels)
    hat, cnt, denom = rooted_counts(m, G)
    total = sum(int(c) for c, h in zip(cnt, hat) if h)
    lhs = Fraction(total, denom * math.perm(25, m.k))
    assert lhs == Fraction(hom_count(F, G, "inj"), math.perm(25, F.p))


def test_nested_label_partial_sum():
    # summing the second root over [n] recovers the count rooted at the first label only
    G = sample(affine(), 12, 2)
    big = LabeledMotif(complete(3), (1, 2))
    small = LabeledMotif(complete(3), (1,))
    for a in range(1, 13):
        s = sum(t_inj_rooted(big, G, (a, b)).inj_count for b in range(1, 13) if b != a)
        assert s == t_inj_rooted(small, G, (a,)).inj_count


def test_numba_and_fallback_agree_on_rooted_arrays():
    G = sample(affine(), 40, 1)
    m = LabeledMotif(named_graph("C4"), (1, 3))
    h1, c1, d1 = rooted_counts(m, G, use_numba=True)
    h2, c2, d2 = rooted_counts(m, G, use_numba=False)
    assert d1 == d2
    assert np.array_equal(h1, h2) and np.array_equal(c1, c2)


def test_large_counts_exact():
    # |Inj(K4, K_n)| = n(n-1)(n-2)(n-3) must come back exactly
    n = 120
    G = SimpleGraph(n, frozenset(itertools.combinations(range(1, n + 1), 2)))
    assert hom_count(complete(4), G, "inj") == math.perm(n, 4)
    assert t_inj(complete(4), G) == 1.0
