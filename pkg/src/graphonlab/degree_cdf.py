"""The empirical degree CDF, its mean c_n and the Gaussian covariance kernel Σ."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import binom
from .errors import DomainError, PreconditionError, RegularityError
from .graphon import degree, degree_prime
from .quadrature import gauss_legendre, integrate_breaks
from .sampler import degree_counts

_NODES = 64


def empirical_cdf(G, W, y):
    """Π_n(y) = (1/n) #{i : D_i <= D(y)}; ``y`` may be an array."""
    if G.n < 2:
        raise DomainError("empirical degree CDF needs n >= 2")
    y = np.asarray(y, dtype=float)
    if np.any((y < 0) | (y > 1)):
        raise DomainError("y must lie in [0, 1]")
    di = degree_counts(G) / (G.n - 1)
    d = np.atleast_1d(np.asarray(degree(W, y), dtype=float))
    out = (di[None, :] <= d[:, None]).mean(axis=1)
    return float(out[0]) if y.ndim == 0 else out


def _require_increasing(W, *points):
    for x in points:
        if float(degree_prime(W, x)) <= 0:
            raise RegularityError(f"D'({x}) <= 0 for {W!r}")


def c_n_exact(W, n, y):
    """c_n(y) = ∫ H_{n,D(y),0}(D(x)) dx, i.e. E Π_{n+1}(y)."""
    _require_increasing(W, y)
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    return y + binom.integrate_h(W, one, y, 0.0, n)


def c_n_expansion(W, n, y, lattice="right", strict=False):
    """n(c_n(y) - y) against -(D''/D'^3) σ²_d/2 + ((1-2d)/2 + S(nd))/D'."""
    _require_increasing(W, y)
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return binom.integral_expansion_check(W, one, y, 0.0, n, dG=zero, lattice=lattice, strict=strict)


# -- Σ kernel -----------------------------------------------------------------


@dataclass(frozen=True)
class SigmaParts:
    s1: float
    s2: float
    s3: float

    @property
    def total(self):
        return self.s1 + self.s2 + self.s3

    def __iter__(self):
        return iter((self.s1, self.s2, self.s3, self.total))


def _row(W, y, a=0.0, b=1.0):
    """∫_a^b W(y, x) dx."""
    if b <= a:
        return 0.0
    x, w = gauss_legendre(_NODES, a, b)
    return float(np.dot(w, W(y, x)))


def _cross(W, y, z):
    x, w = gauss_legendre(_NODES)
    return float(np.dot(w, W(y, x) * W(z, x)))


def _check_open(*ys):
    for v in ys:
        if not 0.0 < v < 1.0:
            raise DomainError("kernel arguments must lie in (0, 1)")


def sigma_kernel(W, y, z):
    """(Σ1, Σ2, Σ3, Σ) at (y, z)."""
    _check_open(y, z)
    dy, dz = float(degree(W, y)), float(degree(W, z))
    py, pz = float(degree_prime(W, y)), float(degree_prime(W, z))
    if py <= 0 or pz <= 0:
        raise RegularityError("D' must be positive")
    s1 = min(y, z) - y * z
    s2 = (_cross(W, y, z) - dy * dz) / (py * pz)
    s3 = (dy * z - _row(W, y, 0.0, z)) / py + (dz * y - _row(W, z, 0.0, y)) / pz
    return SigmaParts(s1, s2, s3)


def sigma_diag(W, y):
    """Σ(y, y) written as the single-point variance formula."""
    _check_open(y)
    d, dp = float(degree(W, y)), float(degree_prime(W, y))
    x, w = gauss_legendre(_NODES)
    w2 = float(np.dot(w, W(y, x) ** 2))
    return y * (1 - y) + (w2 - d * d) / dp**2 + 2 * (d * y - _row(W, y, 0.0, y)) / dp


def rho(W, y, u):
    """ρ(y, u) = 1{u <= y} - W(y, u)/D'(y)."""
    u = np.asarray(u, dtype=float)
    return (u <= y).astype(float) - W(y, u) / float(degree_prime(W, y))


def chi_variance_rho(W, y, z):
    """∫ (ρ(y,u) - ρ̄(y))(ρ(z,u) - ρ̄(z)) du, with ρ̄ integrated numerically too."""
    _check_open(y, z)
    _require_increasing(W, y, z)
    br = [0.0, min(y, z), max(y, z), 1.0]
    ry = integrate_breaks(lambda u: rho(W, y, u), br, _NODES)
    rz = integrate_breaks(lambda u: rho(W, z, u), br, _NODES)
    return integrate_breaks(lambda u: (rho(W, y, u) - ry) * (rho(W, z, u) - rz), br, _NODES)


# -- H_n and its limits -------------------------------------------------------


def h_limit(W, y, u):
    """(D(y) - W(y, u))/D'(y), the limit of H_n(y, u)."""
    return (float(degree(W, y)) - W(y, np.asarray(u, dtype=float))) / float(degree_prime(W, y))


def h_star_limit(y, u):
    """1{u <= y} - y, the limit of H*_n(y, u) for u != y."""
    u = np.asarray(u, dtype=float)
    return (u <= y).astype(float) - y


def h_n_exact(W, n, y, u):
    """H_n(y, u) = n(P(D_1 <= d | X_2 = u) - c_n(y)) on n + 1 vertices.

    Given X_1 = x the degree of vertex 1 is 1{12 ∈ E} + Bin(n-1, D(x)).
    """
    _require_increasing(W, y)
    d = float(degree(W, y))
    k = math.floor(n * d)

    def f(x):
        p = binom._clip_p(degree(W, x))
        wxu = W(x, u)
        return wxu * binom.cdf_at(n - 1, k - 1, p) + (1 - wxu) * binom.cdf_at(n - 1, k, p)

    cond = binom.integrate_piecewise(W, y, n, d, f)
    return n * (cond - c_n_exact(W, n, y))


def h_star_exact(W, n, y, u):
    """H*_n(y, u) = P(Bin(n, D(u)) <= n D(y)) - c_n(y)."""
    d = float(degree(W, y))
    p = float(binom._clip_p(degree(W, u)))
    return binom.cdf_at(n, math.floor(n * d), p) - c_n_exact(W, n, y)


# -- Bernoulli pair covariance ------------------------------------------------


@dataclass(frozen=True)
class BernoulliCov:
    matrix: np.ndarray
    det: float

    @property
    def positive(self):
        return self.det > 0


def bernoulli_cov_matrix(W, y1, y2, strict=False):
    """M(y): covariance of (Y1, Y2) with P(Y_i = 1) = D(y_i), P(Y1 = Y2 = 1) = ∫W(y1,z)W(y2,z)dz."""
    d1, d2 = float(degree(W, y1)), float(degree(W, y2))
    off = _cross(W, y1, y2) - d1 * d2
    m = np.array([[d1 * (1 - d1), off], [off, d2 * (1 - d2)]])
    det = float(m[0, 0] * m[1, 1] - off * off)
    if strict and det <= 0:
        raise RegularityError(f"det M({y1}, {y2}) = {det} <= 0; the regularity condition fails")
    return BernoulliCov(m, det)


def majo_intfg_bound(eps, delta):
    """(1 - ε)(ε - δ), the sharp lower bound on ∫fg."""
    if not 0 < eps < 0.5 or abs(delta) > eps / 2:
        raise DomainError("need eps in (0, 1/2) and |delta| <= eps/2")
    return (1 - eps) * (eps - delta)


def majo_intfg_check(f, g, eps, delta, grid=4096, tol=1e-9):
    """Check the hypotheses on a midpoint grid and return (∫fg, bound, holds)."""
    bound = majo_intfg_bound(eps, delta)
    x = (np.arange(grid) + 0.5) / grid
    fv = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    gv = np.broadcast_to(np.asarray(g(x), dtype=float), x.shape)
    if fv.min() < -tol or gv.min() < -tol or max(fv.max(), gv.max()) > 1 - eps + tol:
        raise PreconditionError("f and g must take values in [0, 1 - eps]")
    if abs((fv + gv).mean() - (1 - delta)) > 1e-6:
        raise PreconditionError("∫(f + g) must equal 1 - delta")
    val = float((fv * gv).mean())
    return val, bound, val >= bound - tol
