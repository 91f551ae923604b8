import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from graphonlab import binom
from graphonlab.errors import DomainError, SizeError
from graphonlab.graphon import affine, constant, degree, product
from graphonlab.graphs import complete, empty
from graphonlab.hom import t_inj
from graphonlab.sampler import degree_counts, degree_sequence, edge_density, latents, sample


def test_extreme_graphons():
    G = sample(constant(1.0), 4, 123)
    assert G.to_simple_graph() == complete(4)
    G0 = sample(constant(0.0), 4, 123)
    assert G0.to_simple_graph() == empty(4)


def test_edge_density_concentration():
    G = sample(constant(0.5), 1000, 2024)
    pairs = math.comb(1000, 2)
    sigma = 1 / (2 * math.sqrt(pairs))
    assert abs(edge_density(G) - 0.5) <= 4 * sigma


def test_structure_invariants():
    G = sample(affine(), 130, 5)
    A = G.adjacency()
    assert np.array_equal(A, A.T) and not A.diagonal().any()
    assert np.all((G.latent >= 0) & (G.latent <= 1))
    assert G.num_edges == A.sum() // 2
    assert np.array_equal(degree_counts(G), A.sum(1))
    with pytest.raises(ValueError):
        G.latent[0] = 0.5


def test_reproducible_and_backend_independent():
    W = product(0.1)
    a = sample(W, 150, 77)
    b = sample(W, 150, 77)
    c = sample(W, 150, 77, use_numba=False)
    assert np.array_equal(a.bits, b.bits) and np.array_equal(a.bits, c.bits)
    assert np.array_equal(a.latent, b.latent) and np.array_equal(a.latent, latents(150, 77))
    d = sample(W, 150, 78)
    assert not np.array_equal(a.bits, d.bits)


def test_degree_sequence_examples():
    assert degree_sequence(sample(constant(1.0), 3, 0)).tolist() == [1.0, 1.0, 1.0]
    assert degree_sequence(sample(constant(0.0), 3, 0)).tolist() == [0.0, 0.0, 0.0]
    with pytest.raises(DomainError):
        degree_sequence(sample(constant(0.5), 1, 0))
    with pytest.raises(SizeError):
        sample(constant(0.5), 0, 0)
    G = sample(affine(), 40, 9)
    assert degree_sequence(G).mean() == pytest.approx(t_inj(complete(2), G), abs=1e-15)


def test_io_formats():
    G = sample(affine(), 6, 4)
    text = G.to_edgelist()
    assert text.splitlines()[0] == f"6 {G.num_edges}"
    csv = G.latent_csv().splitlines()
    assert csv[0] == "vertex,latent" and len(csv) == 7
    assert float(csv[1].split(",")[1]) == G.latent[0]


def test_frozen_latent_edges_are_independent_bernoulli():
    # chi-square over pair classes with the latent vector held fixed
    n, reps = 12, 3000
    x = np.linspace(0.05, 0.95, n)
    W = affine()
    P = W(x[:, None], x[None, :])
    iu = np.triu_indices(n, 1)
    hits = np.zeros(len(iu[0]))
    for s in range(reps):
        G = sample(W, n, s, latent=x)
        assert np.array_equal(G.latent, x)
        hits += G.adjacency()[iu]
    p = P[iu]
    chi2 = float(np.sum((hits - reps * p) ** 2 / (reps * p * (1 - p))))
    assert stats.chi2.sf(chi2, len(p)) > 1e-3
    with pytest.raises(DomainError):
        sample(W, n, 0, latent=x[:-1])
    with pytest.raises(DomainError):
        sample(W, 2, 0, latent=[0.2, 1.2])


def test_degree_given_latent_is_binomial():
    # (n-1) D_1 given X_1 = u is Bin(n-1, D(u)): KS against the exact binomial CDF
    n, reps, u = 60, 1500, 0.3
    W = affine()
    rng = np.random.default_rng(3)
    degs = []
    for s in range(reps):
        x = rng.random(n)
        x[0] = u
        G = sample(W, n, 10_000 + s, latent=x)
        degs.append(int(degree_counts(G)[0]))
    degs = np.array(degs)
    p = float(degree(W, u))
    ks = 0.0
    for k in range(n):
        hi, lo = float(binom.cdf_at(n - 1, k, p)), float(binom.cdf_at(n - 1, k - 1, p))
        ks = max(ks, abs(np.mean(degs <= k) - hi), abs(np.mean(degs < k) - lo))
    # asymptotic 0.1% critical value of the KS statistic
    assert ks < 1.95 / math.sqrt(reps)


def test_fallback_backend_via_environment():
    code = (
        "from graphonlab import backend, sample, affine; import hashlib;"
        "G = sample(affine(), 90, 3); print(backend(), hashlib.sha256(G.bits.tobytes()).hexdigest())"
    )
    env = dict(os.environ, GRAPHONLAB_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    name, digest = out.split()
    assert name == "numpy"
    import hashlib

    assert digest == hashlib.sha256(sample(affine(), 90, 3).bits.tobytes()).hexdigest()
