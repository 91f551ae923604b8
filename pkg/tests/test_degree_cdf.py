import math

import numpy as np
import pytest
import sympy

from graphonlab import affine, constant, product, rng, sample
from graphonlab.binom import fit_loglog_slope
from graphonlab.degree_cdf import (
    bernoulli_cov_matrix,
    c_n_exact,
    c_n_expansion,
    chi_variance_rho,
    empirical_cdf,
    h_limit,
    h_n_exact,
    h_star_exact,
    h_star_limit,
    majo_intfg_bound,
    majo_intfg_check,
    rho,
    sigma_diag,
    sigma_kernel,
)
from graphonlab.errors import DomainError, PreconditionError, RegularityError
from graphonlab.graphon import degree
from graphonlab.quadrature import integrate_1d
from graphonlab.sampler import degree_counts

A = affine()
REGULAR = [A, product(0.1)]


def affine_sigma(y, z):
    # ρ(y,u) = 1{u<=y} - (y+u) for W = (x+y)/2, so Σ = Cov of 1{U<=y} - U and 1{U<=z} - U
    return min(y, z) - y * z + y * (1 - y) / 2 + z * (1 - z) / 2 + 1 / 12


def sym_affine_cn(n, y):
    """c_n(y) for W = (x+y)/2 in exact rationals: D(x) = x/2 + 1/4 is linear."""
    x = sympy.Symbol("x")
    D = x / 2 + sympy.Rational(1, 4)
    d = sympy.nsimplify(y) / 2 + sympy.Rational(1, 4)
    k = math.floor(n * d)
    poly = sum(sympy.binomial(n, j) * D**j * (1 - D) ** (n - j) for j in range(k + 1))
    return sympy.integrate(sympy.expand(poly), (x, 0, 1))


# -- empirical CDF ------------------------------------------------------------


def test_empirical_cdf_examples():
    full = sample(constant(1.0), 3, 0)
    assert empirical_cdf(full, constant(1.0), 1.0) == 1.0
    empty = sample(constant(0.0), 5, 0)
    assert empirical_cdf(empty, A, 0.2) == 1.0
    G = sample(A, 50, 1)
    vals = empirical_cdf(G, A, np.array([0.1, 0.5, 0.9]))
    assert np.all(np.diff(vals) >= 0)
    with pytest.raises(DomainError):
        empirical_cdf(G, A, 1.5)


@pytest.mark.slow
def test_empirical_cdf_mean():
    vals = [empirical_cdf(sample(A, 200, rng.derive_seed(5, 200, r)), A, 0.5) for r in range(500)]
    assert abs(np.mean(vals) - 0.5) <= 0.01


# -- c_n ----------------------------------------------------------------------


@pytest.mark.parametrize("n,y", [(10, 0.5), (17, 0.3), (40, 0.8)])
def test_c_n_exact_matches_rational(n, y):
    assert c_n_exact(A, n, y) == pytest.approx(float(sym_affine_cn(n, y)), abs=1e-13)


def test_c_n_rejects_constant_graphon():
    with pytest.raises(RegularityError):
        c_n_exact(constant(0.5), 10, 0.5)


def test_c_n_expansion_residual_decays():
    ns = [256, 1024, 4096]
    res = [abs(c_n_expansion(A, n, 0.37).lhs - c_n_expansion(A, n, 0.37).rhs) for n in ns]
    assert fit_loglog_slope(ns, res) <= -0.2


# -- Σ kernel -----------------------------------------------------------------


def test_sigma_examples():
    assert sigma_kernel(A, 0.5, 0.5).total == pytest.approx(7 / 12, abs=1e-14)
    for y in (0.1, 0.3, 0.5, 0.77):
        assert sigma_kernel(A, y, y).total == pytest.approx(2 * y * (1 - y) + 1 / 12, abs=1e-14)
    assert sigma_kernel(A, 0.2, 0.8).total == pytest.approx(sigma_kernel(A, 0.8, 0.2).total, abs=1e-14)
    assert sigma_kernel(A, 0.2, 0.8).s1 == pytest.approx(0.04, abs=1e-16)
    with pytest.raises(DomainError):
        sigma_kernel(A, 0.0, 0.5)
    with pytest.raises(RegularityError):
        sigma_kernel(constant(0.4), 0.3, 0.5)


@pytest.mark.parametrize("W", REGULAR)
def test_sigma_symmetric_and_diag(W):
    grid = np.linspace(0.05, 0.95, 10)
    for y in grid:
        assert sigma_diag(W, y) == pytest.approx(sigma_kernel(W, y, y).total, abs=1e-14)
        assert sigma_kernel(W, y, y).total >= 0
        for z in grid:
            assert abs(sigma_kernel(W, y, z).total - sigma_kernel(W, z, y).total) <= 1e-10


def test_sigma_affine_closed_form_grid():
    for y in np.linspace(0.05, 0.95, 7):
        for z in np.linspace(0.05, 0.95, 7):
            assert sigma_kernel(A, y, z).total == pytest.approx(affine_sigma(y, z), abs=1e-13)


@pytest.mark.parametrize("W", REGULAR)
def test_rho_representation(W):
    grid = np.linspace(0.05, 0.95, 10)
    worst = max(abs(chi_variance_rho(W, y, z) - sigma_kernel(W, y, z).total) for y in grid for z in grid)
    assert worst <= 1e-8


def test_rho_examples():
    assert chi_variance_rho(A, 0.5, 0.5) == pytest.approx(7 / 12, abs=1e-13)
    assert chi_variance_rho(A, 1e-9, 1e-9) == pytest.approx(1 / 12, abs=1e-8)
    assert rho(A, 0.5, 0.2) == pytest.approx(1 - 0.35 / 0.5)


# -- H_n ----------------------------------------------------------------------


def test_h_limit_examples():
    assert h_limit(A, 0.5, 0.5) == pytest.approx(0.0, abs=1e-15)
    assert h_limit(A, 0.5, 0.0) == pytest.approx(0.5, abs=1e-15)
    for W in REGULAR:
        for y in (0.2, 0.6):
            assert integrate_1d(lambda u: h_limit(W, y, u), 0, 1) == pytest.approx(0, abs=1e-13)
    assert h_star_limit(0.3, 0.2) == pytest.approx(0.7)
    assert h_star_limit(0.3, 0.9) == pytest.approx(-0.3)


def test_h_n_exact_matches_rational():
    # H_n(y, u) with degree 1{12 in E} + Bin(n-1, D(x)) given X_1 = x, X_2 = u
    n, y, u = 12, 0.5, sympy.Rational(1, 5)
    x = sympy.Symbol("x")
    D = x / 2 + sympy.Rational(1, 4)
    w = (x + u) / 2
    k = math.floor(n * 0.5)

    def cdf(m, j):
        return sum(sympy.binomial(m, i) * D**i * (1 - D) ** (m - i) for i in range(j + 1)) if j >= 0 else 0

    cond = sympy.integrate(sympy.expand(w * cdf(n - 1, k - 1) + (1 - w) * cdf(n - 1, k)), (x, 0, 1))
    exact = n * (cond - sym_affine_cn(n, y))
    assert h_n_exact(A, n, y, 0.2) == pytest.approx(float(exact), abs=1e-12)


def test_h_n_tends_to_limit():
    for u in (0.0, 0.3, 0.9):
        gaps = [abs(h_n_exact(A, n, 0.5, u) - h_limit(A, 0.5, u)) for n in (100, 400, 1600)]
        assert gaps[-1] < 0.1 and gaps[-1] < gaps[0]
    assert abs(h_star_exact(A, 4000, 0.5, 0.2) - h_star_limit(0.5, 0.2)) < 0.02


# -- Bernoulli pair matrix ----------------------------------------------------


def test_bernoulli_cov_examples():
    m = bernoulli_cov_matrix(A, 0.5, 0.5)
    assert m.matrix[0, 0] == pytest.approx(0.25) and m.matrix[1, 1] == pytest.approx(0.25)
    assert m.matrix[0, 1] == pytest.approx(1 / 48, abs=1e-15)
    edge = bernoulli_cov_matrix(A, 0.0, 1.0)
    assert np.allclose(edge.matrix, edge.matrix.T) and edge.positive


@pytest.mark.parametrize("W", REGULAR)
def test_bernoulli_det_positive_on_grid(W):
    g = np.linspace(0, 1, 50)
    assert min(bernoulli_cov_matrix(W, a, b).det for a in g for b in g) > 0


def test_bernoulli_det_flags_degenerate():
    with pytest.raises(RegularityError):
        bernoulli_cov_matrix(constant(1.0), 0.3, 0.6, strict=True)


def test_majo_intfg_sharp():
    eps, delta = 0.2, 0.05
    val, bound, ok = majo_intfg_check(lambda x: np.full_like(x, 1 - eps), lambda x: np.full_like(x, eps - delta), eps, delta)
    assert ok and val == pytest.approx(bound, abs=1e-12)
    assert majo_intfg_bound(eps, delta) == pytest.approx(0.8 * 0.15)
    # a spread-out pair does at least as well
    f = lambda x: 0.5 + 0.2 * np.cos(2 * np.pi * x)  # noqa: E731
    g = lambda x: 0.45 - 0.1 * np.cos(2 * np.pi * x)  # noqa: E731
    assert majo_intfg_check(f, g, eps, delta)[2]
    with pytest.raises(PreconditionError):
        majo_intfg_check(lambda x: np.full_like(x, 0.9), g, eps, delta)
    with pytest.raises(DomainError):
        majo_intfg_bound(0.6, 0.0)


# -- Monte Carlo --------------------------------------------------------------


@pytest.mark.slow
def test_pairwise_indicator_product_tends_to_sigma2():
    # n E[(1{D1<=d1} - 1{X1<=y1})(1{D2<=d2} - 1{X2<=y2})], averaged over all ordered pairs of each graph
    n, y1, y2, reps = 400, 0.3, 0.7, 1500
    d1, d2 = float(degree(A, y1)), float(degree(A, y2))
    vals = []
    for r in range(reps):
        G = sample(A, n, rng.derive_seed(11, n, r))
        D = degree_counts(G) / (n - 1)
        a = (D <= d1).astype(float) - (G.latent <= y1)
        b = (D <= d2).astype(float) - (G.latent <= y2)
        vals.append((a.sum() * b.sum() - (a * b).sum()) / (n - 1))
    v = np.array(vals)
    se = v.std(ddof=1) / math.sqrt(reps)
    assert abs(v.mean() - sigma_kernel(A, y1, y2).s2) <= 3 * se
