"""Exact binomial CDF and its Edgeworth-type expansions.

``H(n, d, delta, p) = P(X <= n d + delta)`` for ``X ~ Bin(n, p)``.  The CDF
sums the tail on the far side of the mode and complements when needed.  The
term at the tail edge is computed once in extended precision, the rest by the
exact ratio recurrence, so the sum keeps full relative precision.  Loader's
saddle-point log-pmf (Stirling error plus the deviance ``bd0``) is exposed
separately for vectorised pmf work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate, special

from .errors import DomainError

_LN_SQRT_2PI = 0.5 * math.log(2 * math.pi)

_STIRLERR = np.array([
    0.0,
    0.08106146679532725821967, 0.04134069595540929409382,
    0.02767792568499833914879, 0.02079067210376509311152,
    0.01664469118982119216319, 0.01387612882307074799875,
    0.01189670994589177009506, 0.01041126526197209649748,
    0.009255462182712732917729, 0.008330563433362871256469,
    0.007573675487951840794972, 0.006942840107209529865664,
    0.00640899418800420706844, 0.005951370112758847735624,
    0.005554733551962801371039,
])
_S0, _S1, _S2, _S3, _S4 = 1 / 12, 1 / 360, 1 / 1260, 1 / 1680, 1 / 1188


def _stirlerr(n):
    """log(n!) - log(sqrt(2 pi n) (n/e)^n) for integer n >= 0 (array)."""
    n = np.asarray(n, dtype=float)
    out = np.empty_like(n)
    small = n <= 15
    out[small] = _STIRLERR[n[small].astype(int)]
    big = ~small
    nn = n[big] * n[big]
    x = n[big]
    out[big] = np.where(
        x > 500, (_S0 - _S1 / nn) / x,
        np.where(x > 80, (_S0 - (_S1 - _S2 / nn) / nn) / x,
                 np.where(x > 35, (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / x,
                          (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / x)))
    return out


def _bd0(x, m):
    """x log(x/m) + m - x, accurate when x is close to m."""
    x, m = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(m, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = x * np.log(x / m) + m - x
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2 * x * v
        v2 = v * v
        series = s.copy()
        for j in range(1, 40):
            ej = ej * v2
            series = series + ej / (2 * j + 1)
    close = np.abs(x - m) < 0.1 * (x + m)
    out = np.where(close, series, direct)
    return np.where(x == 0, m, out)


def log_pmf(x, n, p):
    """log P(Bin(n, p) = x), broadcasting over ``x`` and ``p``."""
    x, p = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(p, dtype=float))
    q = 1.0 - p
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = np.clip(x, 1, n - 1) if n > 1 else x
        core = (
            _stirlerr(np.full(x.shape, n)) - _stirlerr(xi) - _stirlerr(n - xi)
            - _bd0(xi, n * p) - _bd0(n - xi, n * q)
            + 0.5 * np.log(n / (2 * math.pi * xi * (n - xi)))
        )
        out = np.where(x == 0, n * np.log1p(-p), np.where(x == n, n * np.log(p), core))
    return out


def _check_p(p):
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)) or np.any(np.isnan(p)):
        raise DomainError("success probability must lie in (0, 1)")
    return p


_LD = np.longdouble
_LD_TINY = mpmath.mpf(str(np.finfo(np.longdouble).tiny))


def _edge_pmf(n, e, p):
    """P(X = e) for each entry of ``p`` from 40-digit arithmetic, as long doubles."""
    with mpmath.workdps(40):
        lc = mpmath.loggamma(n + 1) - mpmath.loggamma(e + 1) - mpmath.loggamma(n - e + 1)
        out = np.empty(p.shape[0], dtype=_LD)
        for i, pi in enumerate(p.tolist()):
            P = mpmath.mpf(pi)
            v = mpmath.exp(lc + e * mpmath.log(P) + (n - e) * mpmath.log1p(-P))
            # below the long double range the whole tail is negligible
            out[i] = _LD(mpmath.nstr(v, 25)) if v > _LD_TINY else 0
    return out


def _tail_sum(n, e, p, lower):
    """Sum of pmf from the edge ``e`` outwards (down to 0, or up to n).

    The ratio recurrence runs in extended precision so that its rounding
    drift stays far below double resolution even for n near 10^6.
    """
    span = e + 1 if lower else n - e + 1
    span = min(span, int(14 * math.sqrt(n)) + 40)
    head = _edge_pmf(n, e, p)
    if span == 1:
        return head.astype(float)
    pl = p.astype(_LD)
    if lower:
        j = np.arange(e, e - span + 1, -1).astype(_LD)  # e, e-1, ...
        step = j / (n - j + 1)
        odds = (1 - pl) / pl
    else:
        j = np.arange(e, e + span - 1).astype(_LD)  # e, e+1, ...
        step = (n - j) / (j + 1)
        odds = pl / (1 - pl)
    terms = head[:, None] * np.cumprod(step[None, :] * odds[:, None], axis=1)
    return (head + terms.sum(axis=1)).astype(float)


def cdf_at(n, k, p):
    """P(Bin(n, p) <= k) for integer ``k`` and an array of ``p``."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    p = _check_p(p)
    scalar = p.ndim == 0
    p = np.atleast_1d(p).astype(float)
    k = math.floor(k)
    if k < 0:
        out = np.zeros_like(p)
    elif k >= n:
        out = np.ones_like(p)
    else:
        out = np.empty_like(p)
        low = k < np.floor((n + 1) * p)
        if np.any(low):
            out[low] = _tail_sum(n, k, p[low], lower=True)
        if np.any(~low):
            out[~low] = 1.0 - _tail_sum(n, k + 1, p[~low], lower=False)
    return float(out[0]) if scalar else out


def exact_cdf(n, d, delta, p):
    """H_{n,d,δ}(p) = P(X <= n d + δ), X ~ Bin(n, p)."""
    return cdf_at(n, math.floor(n * d + delta), p)


def oracle_cdf(n, k, p):
    """Exact rational summation, for tests."""
    from fractions import Fraction

    p = Fraction(p)
    k = math.floor(k)
    return sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(0, min(k, n) + 1))


# -- expansions ---------------------------------------------------------------


def sawtooth(x):
    """S(x) = ceil(x) - x - 1/2, equal to -1/2 at integers."""
    x = np.asarray(x, dtype=float)
    out = np.ceil(x) - x - 0.5
    return float(out) if out.ndim == 0 else out


def sawtooth_right(x):
    """floor(x) - x + 1/2: agrees with :func:`sawtooth` off the integers, +1/2 on them.

    This is the version that makes the expansions right-continuous like
    P(X <= t); with :func:`sawtooth` they track P(X < t) at lattice points.
    """
    x = np.asarray(x, dtype=float)
    out = np.floor(x) - x + 0.5
    return float(out) if out.ndim == 0 else out


LATTICE = {"right": sawtooth_right, "left": sawtooth}


def _saw(lattice):
    try:
        return LATTICE[lattice]
    except KeyError:
        raise DomainError(f"lattice must be 'right' or 'left', got {lattice!r}") from None


def sigma2(x):
    return x * (1.0 - x)


def phi(x):
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2 * math.pi)


def Phi(x):
    return special.ndtr(x)


@dataclass(frozen=True)
class EdgeworthValue:
    value: float
    error_bound: float
    in_region: bool
    exact: float
    t: float

    @property
    def error(self):
        return abs(self.exact - self.value)

    @property
    def within_bound(self):
        return self.error <= self.error_bound


def edgeworth_cdf(n, p, x, lattice="right"):
    """Lattice-corrected Edgeworth approximation of P(X <= np + x sqrt(n) σ).

    The exact probability is computed at the same threshold, so the two sides
    see one rounding of ``t``.  ``in_region`` flags n σ² >= 25.  ``lattice``
    picks the sawtooth convention at integer thresholds (see :func:`sawtooth_right`).
    """
    saw = _saw(lattice)
    p = float(_check_p(p))
    s = math.sqrt(sigma2(p))
    rn = math.sqrt(n)
    t = n * p + x * rn * s
    q = (2 * p - 1) * (x * x - 1) * phi(x) / (6 * s)
    value = float(Phi(x) + q / rn + saw(t) * phi(x) / (rn * s))
    bound = (0.2 + 0.3 * abs(2 * p - 1)) / (n * s * s) + math.exp(-1.5 * rn * s)
    return EdgeworthValue(value, bound, n * s * s >= 25, cdf_at(n, math.floor(t), p), t)


@dataclass(frozen=True)
class CdfApprox:
    value: float
    y_s: float
    pi_value: float
    phi_term: float
    correction: float
    envelope: float


def cdf_approx(n, d, delta, s, eps0=None, alpha=None, lattice="right"):
    """Φ(y_s) + φ(y_s) π(s,n,d,δ)/(√n σ_d), approximating H_{n,d,δ}(d + s/√n).

    ``envelope`` is log(n)²/n; the constant in front of it is not explicit and
    is fitted by callers.  With ``eps0``/``alpha`` given the arguments are
    checked against the stated region.
    """
    if eps0 is not None:
        lo, hi = eps0, 1 - eps0
        u = d + s / math.sqrt(n)
        if not (lo <= d <= hi and lo <= u <= hi):
            raise DomainError("d and d + s/sqrt(n) must lie in [eps0, 1 - eps0]")
    if alpha is not None and abs(s) > alpha * math.sqrt(math.log(n)):
        raise DomainError("|s| exceeds alpha sqrt(log n)")
    if not -1 <= delta <= 1:
        raise DomainError("delta must lie in [-1, 1]")
    sd = math.sqrt(sigma2(d))
    if sd == 0:
        raise DomainError("d must lie strictly inside (0, 1)")
    ys = -s / sd
    pi = (1 - 2 * d) * (1 + 2 * ys * ys) / 6 + _saw(lattice)(n * d + delta) + delta
    head = float(Phi(ys))
    corr = float(phi(ys) * pi / (math.sqrt(n) * sd))
    return CdfApprox(head + corr, ys, pi, head, corr, math.log(n) ** 2 / n)


def tail_bound_check(n, d, delta, u, alpha):
    """|H_{n,d,δ}(u) - 1{u <= d}| <= n^(2-α) when √n|u-d| >= α√log n."""
    if not -1 <= delta <= 1:
        raise DomainError("delta must lie in [-1, 1]")
    if math.sqrt(n) * abs(u - d) < alpha * math.sqrt(math.log(n)):
        raise DomainError("u is inside the window sqrt(n)|u - d| < alpha sqrt(log n)")
    h = exact_cdf(n, d, delta, u)
    return abs(h - (1.0 if u <= d else 0.0)) <= n ** (2 - alpha)


@dataclass(frozen=True)
class GaussTailBounds:
    phi_tail: float
    s_phi_integral: float
    s2_density_integral: float
    bound_2: float
    bound_1: float

    @property
    def holds(self):
        return (self.phi_tail <= self.bound_2 and self.s_phi_integral <= self.bound_2
                and self.s2_density_integral <= self.bound_1)


def gaussian_tail_bounds(n, d, alpha):
    """The three Gaussian tail integrals at A = α√log n and their bounds 1/(α n^{2α²}), 1/(α n^{α²})."""
    sd = math.sqrt(sigma2(d))
    a = alpha * math.sqrt(math.log(n))
    t1 = float(Phi(-a / sd))
    t2 = integrate.quad(lambda s: s * Phi(-s / sd), a, np.inf, epsabs=0, epsrel=1e-10)[0]
    t3 = integrate.quad(lambda s: s * s * phi(-s / sd), a, np.inf, epsabs=0, epsrel=1e-10)[0]
    return GaussTailBounds(t1, t2, t3, 1 / (alpha * n ** (2 * alpha * alpha)), 1 / (alpha * n ** (alpha * alpha)))


# -- integral of H against a test function ------------------------------------


def _transition_breaks(W, y, n, d, widths=(0.5, 1, 2, 3, 4, 6, 8, 12, 16)):
    from .graphon import degree, degree_inverse

    sd = math.sqrt(sigma2(d))
    lo_d, hi_d = float(degree(W, 0.0)), float(degree(W, 1.0))
    pts = [0.0, 1.0, y]
    for w in widths:
        for sign in (-1, 1):
            target = d + sign * w * sd / math.sqrt(n)
            if lo_d < target < hi_d:
                pts.append(degree_inverse(W, target))
    pts = np.unique(np.clip(pts, 0, 1))
    # subdivide so no piece is wider than 1/16
    fine = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        k = max(1, math.ceil((b - a) * 16))
        fine.extend(np.linspace(a, b, k + 1)[1:])
    return np.array(fine)


def integrate_piecewise(W, y, n, d, f, nodes=48):
    """Σ over the transition-aware pieces of ∫ f(x) dx; ``f`` is vectorised."""
    total = 0.0
    br = _transition_breaks(W, y, n, d)
    for a, b in zip(br[:-1], br[1:]):
        if b > a:
            from .quadrature import gauss_legendre

            x, w = gauss_legendre(nodes, a, b)
            total += float(np.dot(w, f(x)))
    return total


def _clip_p(p):
    return np.clip(np.asarray(p, dtype=float), 1e-300, 1 - 1e-16)


def integrate_h(W, G, y, delta, n, nodes=48):
    """∫ G(x)(H_{n,d,δ}(D(x)) - 1{x <= y}) dx with d = D(y), piecewise Gauss-Legendre."""
    from .graphon import degree

    d = float(degree(W, y))
    k = math.floor(n * d + delta)

    def f(x):
        h = cdf_at(n, k, _clip_p(degree(W, x)))
        return np.asarray(G(x), dtype=float) * (h - (x <= y))

    return integrate_piecewise(W, y, n, d, f, nodes)


def expansion_rhs(W, G, dG, y, delta, n, lattice="right"):
    """Leading terms of n ∫ G (H - 1{x<=y}) dx."""
    from .graphon import degree, degree_prime, degree_second

    d = float(degree(W, y))
    dp, dpp = float(degree_prime(W, y)), float(degree_second(W, y))
    g, gp = float(G(np.array(y))), float(dG(np.array(y)))
    return (gp * dp - g * dpp) / dp**3 * sigma2(d) / 2 + g / dp * ((1 - 2 * d) / 2 + delta + _saw(lattice)(n * d + delta))


@dataclass(frozen=True)
class ExpansionCheck:
    lhs: float
    rhs: float
    in_window: bool = True

    @property
    def residual(self):
        return abs(self.lhs - self.rhs)


def integral_expansion_check(W, G, y, delta, n, dG=None, lattice="right", strict=True):
    """Compare n ∫ G (H_{n,d,δ}(D(x)) - 1{x<=y}) dx with its two-term expansion.

    The window [d ± 4√log n/√n] must lie in D((0,1)); with ``strict=False``
    a violation is only recorded in ``in_window``.  ``dG`` defaults to a
    central difference of ``G``.
    """
    from .graphon import degree

    if not -1 <= delta <= 1:
        raise DomainError("delta must lie in [-1, 1]")
    d = float(degree(W, y))
    a = 4 * math.sqrt(math.log(n)) / math.sqrt(n)
    inside = float(degree(W, 0.0)) < d - a and d + a < float(degree(W, 1.0))
    if strict and not inside:
        raise DomainError("window d ± 4 sqrt(log n)/sqrt(n) leaves D((0,1))")
    if dG is None:
        def dG(x, h=1e-6):
            return (np.asarray(G(x + h), dtype=float) - np.asarray(G(x - h), dtype=float)) / (2 * h)
    lhs = n * integrate_h(W, G, y, delta, n)
    return ExpansionCheck(lhs, expansion_rhs(W, G, dG, y, delta, n, lattice), inside)


def fit_loglog_slope(ns, values):
    """Least-squares slope of log(values) against log(ns)."""
    x = np.log(np.asarray(ns, dtype=float))
    yv = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, yv, 1)[0])
