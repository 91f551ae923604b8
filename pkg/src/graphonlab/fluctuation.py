"""Random measures of rooted densities, their limits and CLT variances.

For a motif family ``F^l`` with k labels and a host ``G`` on n vertices,
Γ_n(g) averages g(t_inj(F^l, G^α)) over all root words α, and Γ(g) is its
graphon limit.  The CLT variance is Var(𝒰(U)) for a uniform U; 𝒰 is
evaluated on a Gauss-Legendre grid in (x, U) through tensor contractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from . import rng
from .errors import DomainError, PreconditionError, SizeError
from .graphon import Graphon, t_graphon
from .graphs import LabeledMotif, MotifFamily, SimpleGraph, join, supergraphs
from .hom import as_host, count_from, make_plan, rooted_counts, t_inj
from .quadrature import DEFAULT, QuadratureSpec, contract, gauss_legendre

DEFAULT_ALPHA_BUDGET = 10**6


# -- test functions -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TestFunction:
    """g on [0,1]^d.  ``value`` maps (..., d) to (...); ``gradient`` maps (..., d) to (..., d)."""

    __test__ = False  # keep pytest from collecting this class

    value: Callable
    gradient: Optional[Callable] = None
    d: int = 1
    tag: str = "C2"
    kind: str = "custom"
    params: tuple = ()

    def __call__(self, t):
        return np.asarray(self.value(np.asarray(t, dtype=float)), dtype=float)

    def grad(self, t):
        if self.gradient is None:
            raise PreconditionError(f"test function {self.kind} has no gradient")
        return np.asarray(self.gradient(np.asarray(t, dtype=float)), dtype=float)

    def at_zero(self):
        return float(self(np.zeros(self.d)))

    def check_gradient(self, points=100, seed=0, tol=1e-5, h=1e-6):
        """Max deviation between ``gradient`` and central differences at random points."""
        gen = rng.generator(seed, 0x6AD)
        x = gen.uniform(h, 1 - h, size=(points, self.d))
        num = np.empty_like(x)
        for j in range(self.d):
            e = np.zeros(self.d)
            e[j] = h
            num[:, j] = (self(x + e) - self(x - e)) / (2 * h)
        err = float(np.max(np.abs(num - self.grad(x))))
        return err <= tol, err

    # constructors

    @classmethod
    def identity(cls):
        return cls(lambda t: t[..., 0], lambda t: np.ones_like(t), 1, "C2", "id")

    @classmethod
    def linear(cls, a):
        a = np.asarray(a, dtype=float)
        return cls(lambda t: t @ a, lambda t: np.broadcast_to(a, t.shape).copy(), len(a), "C2", "linear", tuple(a))

    @classmethod
    def poly(cls, coeffs):
        """c0 + c1 t + c2 t^2 + ... on [0,1]."""
        c = np.asarray(coeffs, dtype=float)
        if c.size == 0:
            raise DomainError("poly needs at least one coefficient")
        dc = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
        return cls(
            lambda t: np.polynomial.polynomial.polyval(t[..., 0], c),
            lambda t: np.polynomial.polynomial.polyval(t, dc),
            1, "C2", "poly", tuple(c),
        )

    @classmethod
    def constant(cls, c, d=1):
        c = float(c)
        return cls(lambda t: np.full(t.shape[:-1], c), lambda t: np.zeros_like(t), d, "C2", "constant", (c,))

    @classmethod
    def indicator(cls, c):
        """1{t <= c}: permitted in Γ_n and Γ, rejected by the CLT variance."""
        c = float(c)
        return cls(lambda t: (t[..., 0] <= c).astype(float), None, 1, "C0", "indicator", (c,))


def parse_test_function(text, W=None):
    """``id``, ``poly:c0,c1,...``, ``const:c``, ``indicator:y`` (threshold D(y), needs W)."""
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    if kind == "id":
        return TestFunction.identity()
    if kind == "poly":
        return TestFunction.poly([float(v) for v in rest.split(",") if v.strip()])
    if kind == "const":
        return TestFunction.constant(float(rest))
    if kind == "indicator":
        if W is None:
            raise DomainError("indicator:y needs a graphon to turn y into D(y)")
        from .graphon import degree

        return TestFunction.indicator(float(degree(W, float(rest))))
    raise DomainError(f"unknown test function {text!r}")


def _as_family(family):
    if isinstance(family, MotifFamily):
        return family
    if isinstance(family, LabeledMotif):
        return MotifFamily((family,))
    raise TypeError("expected a MotifFamily or LabeledMotif")


def _check_dim(family, g):
    if g.d != family.d:
        raise DomainError(f"test function has dimension {g.d}, family has {family.d} motifs")


# -- Γ_n ----------------------------------------------------------------------


@dataclass(frozen=True)
class GammaEstimate:
    value: float
    exact: bool
    roots_used: int
    roots_total: int

    def __float__(self):
        return self.value


def unrank_word(index, n, k):
    """The ``index``-th word of S_{n,k} in lexicographic order (1-indexed characters)."""
    pool = list(range(1, n + 1))
    out = []
    for pos in range(k):
        block = math.perm(n - pos - 1, k - pos - 1)
        j, index = divmod(index, block)
        out.append(pool.pop(j))
    return tuple(out)


def gamma_n(family, g, G, alpha_budget=DEFAULT_ALPHA_BUDGET, seed=0, use_numba=None):
    """(1/|S_{n,k}|) Σ_α g(t_inj(F^l, G^α)); a seeded uniform subsample of roots past the budget.

    ``alpha_budget="exact"`` always enumerates.
    """
    family = _as_family(family)
    _check_dim(family, g)
    host = as_host(G)
    n, p, k = host.n, family.p, family.k
    if n <= p:
        raise SizeError(f"host needs more than {p} vertices, has {n}")
    total = math.perm(n, k)
    budget = total if alpha_budget == "exact" else int(alpha_budget)
    if total <= budget:
        counts = [rooted_counts(m, host, use_numba) for m in family]
        denom = counts[0][2]
        if g.kind == "id" and family.d == 1:
            hat, cnt, _ = counts[0]
            num = int(cnt[hat.astype(bool)].astype(object).sum()) if cnt.size else 0
            return GammaEstimate(float(Fraction(num, total * denom)), True, total, total)
        t = np.stack([h * c / denom for h, c, _ in counts], axis=-1)
        return GammaEstimate(float(np.mean(g(t))), True, total, total)
    gen = rng.generator(seed, rng.ALPHA, n, k)
    picks = gen.choice(total, size=budget, replace=False) if total < 2**62 else gen.integers(0, total, size=budget)
    plans = [make_plan(m.graph, m.labels) for m in family]
    denom = math.perm(n - k, p - k)
    t = np.empty((budget, family.d))
    for r, idx in enumerate(picks):
        word = unrank_word(int(idx), n, k)
        fixed = [a - 1 for a in word]
        hat = all(host.has_edge(fixed[s], fixed[u]) for s, u in plans[0].label_pairs)
        for j, plan in enumerate(plans):
            t[r, j] = count_from(host, plan, fixed, "inj", use_numba) / denom if hat else 0.0
    return GammaEstimate(float(np.mean(g(t))), False, budget, total)


# -- grid helpers -------------------------------------------------------------


def _hat_edges(family):
    return [(family.labels[a], family.labels[b]) for a, b in family.motifs[0].labeled_edges()]


def _tilde_stack(family, W, q, fixed=None, free=None):
    """tilde t for every motif, stacked on a trailing axis."""
    free = tuple(family.labels) if free is None else free
    vals = [np.asarray(contract(m.p, m.free_edges(), W, q, fixed=fixed, free=free), dtype=float) for m in family]
    return np.stack(vals, axis=-1)


def _hat_grid(family, W, q, fixed=None, free=None):
    free = tuple(family.labels) if free is None else free
    return np.asarray(contract(family.p, _hat_edges(family), W, q, fixed=fixed, free=free), dtype=float)


def _weight_sum(arr, w, axes):
    """Contract the given axes of ``arr`` with the quadrature weights."""
    for ax in sorted(axes, reverse=True):
        arr = np.tensordot(arr, w, axes=([ax], [0]))
    return arr


# -- Γ ------------------------------------------------------------------------


def _indicator_measure(family, c, W, q, grid=2049):
    """Lebesgue measure of {x : tilde t_x <= c} for k = 1, using bracketed roots."""
    from scipy.optimize import brentq

    def f(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return _tilde_stack(family, W, q, fixed={family.labels[0]: x}, free=())[..., 0] - c

    xs = np.linspace(0.0, 1.0, grid)
    vals = f(xs)
    pts = [0.0]
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            pts.append(a)
        elif fa * fb < 0:
            pts.append(brentq(lambda x: float(f(x)[0]), a, b, xtol=1e-15, rtol=1e-15))
    pts.append(1.0)
    pts = np.unique(pts)
    mids = 0.5 * (pts[:-1] + pts[1:])
    below = f(mids) <= 0 if mids.size else np.zeros(0, dtype=bool)
    return float(np.sum(np.diff(pts)[below]))


def gamma_limit(family, g, W, q: QuadratureSpec = DEFAULT):
    """∫ hat t_x g(tilde t_x) dx + (1 - ∫ hat t_x dx) g(0) over [0,1]^k."""
    family = _as_family(family)
    _check_dim(family, g)
    k = family.k
    if k == 0:
        return float(g(np.array([t_graphon(m.graph, W, q) for m in family])))
    if g.kind == "indicator" and k == 1:
        # hat t ≡ 1 for one label, and the jump set is found exactly
        return _indicator_measure(family, g.params[0], W, q)
    _, w = gauss_legendre(q.nodes_per_dim)
    hat = _hat_grid(family, W, q)
    gt = g(_tilde_stack(family, W, q))
    axes = list(range(k))
    mass = float(_weight_sum(hat, w, axes))
    return float(_weight_sum(hat * gt, w, axes)) + (1.0 - mass) * g.at_zero()


# -- CLT variance -------------------------------------------------------------


@dataclass(frozen=True)
class VarianceReport:
    sigma2: float
    mc_error: float = 0.0
    components: dict = field(default_factory=dict)
    method: str = "quadrature"


def _u_blocks(u, size):
    for s in range(0, u.shape[0], size):
        yield u[s : s + size]


def u_functional(family, g, W, u, q: QuadratureSpec = DEFAULT):
    """The two sums of 𝒰 evaluated at the points ``u``: returns (substitution terms, gradient terms)."""
    family = _as_family(family)
    labels = tuple(family.labels)
    k, p = family.k, family.p
    _, w = gauss_legendre(q.nodes_per_dim)
    u = np.asarray(u, dtype=float)
    g0 = g.at_zero()

    term1 = np.zeros(u.shape[0])
    for i in range(k):
        others = labels[:i] + labels[i + 1 :]
        fixed = {labels[i]: u}
        hat = _hat_grid(family, W, q, fixed=fixed, free=others)
        gt = g(_tilde_stack(family, W, q, fixed=fixed, free=others)) - g0
        term1 += _weight_sum(hat * gt, w, list(range(1, k)))

    term2 = np.zeros(u.shape[0])
    unlabeled = [v for v in range(1, p + 1) if v not in labels]
    if unlabeled:
        grad = g.grad(_tilde_stack(family, W, q))  # (m,)*k + (d,)
        for vq in unlabeled:
            for j, m in enumerate(family):
                tq = np.asarray(contract(p, m.graph.sorted_edges(), W, q, fixed={vq: u}, free=labels), dtype=float)
                term2 += _weight_sum(tq * grad[..., j], w, list(range(1, k + 1)))
    return term1, term2


def sigma2_clt(family, g, W, q: QuadratureSpec = DEFAULT, method="quadrature", mc_draws=100_000, seed=0):
    """σ²(g) = Var 𝒰(U).

    ``method="quadrature"`` integrates U on the Gauss-Legendre nodes (exact for
    polynomial kernels); ``"mc"`` draws U uniformly and reports the standard
    error of the variance estimate.  For k = 1 the substitution sum reduces to
    g(t_U) - g(0) since hat t ≡ 1.
    """
    family = _as_family(family)
    _check_dim(family, g)
    if g.gradient is None or g.tag != "C2":
        raise PreconditionError("the CLT variance needs a C2 test function with a gradient")
    m = q.nodes_per_dim
    block = max(1, (1 << 21) // m ** max(family.k, 1))
    if method == "quadrature":
        u, wu = gauss_legendre(m)
    elif method == "mc":
        u = rng.generator(seed, rng.MONTE_CARLO, 0xC17).random(int(mc_draws))
        wu = np.full(u.shape[0], 1.0 / u.shape[0])
    else:
        raise DomainError(f"unknown method {method!r}")
    parts = [u_functional(family, g, W, ub, q) for ub in _u_blocks(u, block)]
    t1 = np.concatenate([a for a, _ in parts])
    t2 = np.concatenate([b for _, b in parts])
    total = t1 + t2

    def wvar(a, b):
        return float(np.dot(wu, a * b) - np.dot(wu, a) * np.dot(wu, b))

    var = max(wvar(total, total), 0.0)
    comps = {
        "mean": float(np.dot(wu, total)),
        "var_substitution": wvar(t1, t1),
        "var_gradient": wvar(t2, t2),
        "cov": wvar(t1, t2),
    }
    se = 0.0
    if method == "mc":
        nd = total.shape[0]
        var = var * nd / (nd - 1)
        c = total - total.mean()
        m4 = float(np.mean(c**4))
        se = math.sqrt(max(m4 - var * var, 0.0) / nd)
    return VarianceReport(var, se, comps, method)


# -- covariance kernels -------------------------------------------------------


def _rooted_sum_on_nodes(F, W, q, complement=False):
    """Σ_q t_U(F^q, W) on the U nodes, optionally with induced (1-W) factors."""
    comp = F.non_edges() if complement else ()
    return sum(
        np.asarray(contract(F.p, F.sorted_edges(), W, q, free=(v,), complement_edges=comp), dtype=float)
        for v in range(1, F.p + 1)
    )


def _node_cov(a, b, q):
    _, w = gauss_legendre(q.nodes_per_dim)
    return float(np.dot(w, a * b) - np.dot(w, a) * np.dot(w, b))


def k_inj(F, F2, W, q: QuadratureSpec = DEFAULT, method="join"):
    """K_inj(F, F') by the rooted covariance ("joint") or by graph joins ("join")."""
    if method == "joint":
        return _node_cov(_rooted_sum_on_nodes(F, W, q), _rooted_sum_on_nodes(F2, W, q), q)
    if method == "join":
        s = sum(t_graphon(join(F, F2, a, b), W, q) for a in range(1, F.p + 1) for b in range(1, F2.p + 1))
        return s - F.p * F2.p * t_graphon(F, W, q) * t_graphon(F2, W, q)
    raise DomainError(f"unknown method {method!r}")


def k_ind(F1, F2, W, q: QuadratureSpec = DEFAULT, method="join"):
    """K_ind(F1, F2), the covariance kernel of induced densities.

    ``join`` and ``cov`` expand over supergraphs F' >= F with sign
    (-1)^{e(F') - e(F)}; ``direct`` integrates induced rooted densities.
    """
    if method == "direct":
        return _node_cov(_rooted_sum_on_nodes(F1, W, q, True), _rooted_sum_on_nodes(F2, W, q, True), q)
    s1, s2 = supergraphs(F1), supergraphs(F2)
    if method == "cov":
        a = sum((-1) ** e * _rooted_sum_on_nodes(G, W, q) for G, e in s1)
        b = sum((-1) ** e * _rooted_sum_on_nodes(G, W, q) for G, e in s2)
        return _node_cov(a, b, q)
    if method == "join":
        return sum((-1) ** (e1 + e2) * k_inj(G1, G2, W, q, "join") for G1, e1 in s1 for G2, e2 in s2)
    raise DomainError(f"unknown method {method!r}")


# -- quantum graphs -----------------------------------------------------------


def quantum_density(coeffs, motifs, host, q: QuadratureSpec = DEFAULT):
    """⟨a, t_inj(F, G)⟩ for a finite host, ⟨a, t(F, W)⟩ for a graphon."""
    coeffs = list(coeffs)
    motifs = list(motifs)
    if len(coeffs) != len(motifs):
        raise DomainError(f"{len(coeffs)} coefficients for {len(motifs)} motifs")
    if isinstance(host, Graphon):
        return float(sum(a * t_graphon(F, host, q) for a, F in zip(coeffs, motifs) if a != 0))
    return float(sum(a * t_inj(F, host) for a, F in zip(coeffs, motifs) if a != 0))


def quantum_variance(coeffs, motifs, W, q: QuadratureSpec = DEFAULT, method="join"):
    """σ(𝔉)² = Σ a_m a_m' K_inj(F_m, F_m')."""
    coeffs = list(coeffs)
    motifs = list(motifs)
    if len(coeffs) != len(motifs):
        raise DomainError(f"{len(coeffs)} coefficients for {len(motifs)} motifs")
    return float(sum(
        a * b * k_inj(F, F2, W, q, method)
        for a, F in zip(coeffs, motifs) for b, F2 in zip(coeffs, motifs) if a * b != 0
    ))


def er_scaling_target(F: SimpleGraph, p):
    """Limit variance of n (t_inj(F, G_n) - p^e) for W ≡ p: 2 e² p^{2e-1} (1-p)."""
    e = F.e
    return 2 * e * e * p ** (2 * e - 1) * (1 - p)
