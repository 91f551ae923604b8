"""Graphons, their degree function, and integral homomorphism densities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, PreconditionError, RegularityError
from .graphs import LabeledMotif, supergraphs
from .quadrature import DEFAULT, QuadratureSpec, contract, gauss_legendre, monte_carlo

_DEG_NODES = 64


@dataclass(frozen=True, eq=False)
class Graphon:
    """A symmetric kernel on [0,1]^2 with optional analytic degree data.

    ``kernel`` must broadcast over NumPy arrays.  ``D``, ``dD``, ``d2D`` and
    ``Dinv`` are the degree function, its first two derivatives and its
    inverse; any missing piece is computed numerically.
    """

    kernel: Callable
    name: str = "custom"
    params: tuple = ()
    D: Optional[Callable] = None
    dD: Optional[Callable] = None
    d2D: Optional[Callable] = None
    Dinv: Optional[Callable] = None
    kernel_dx: Optional[Callable] = None
    kernel_dxx: Optional[Callable] = None
    epsilon0: Optional[float] = None
    is_c3: bool = False
    monotone: Optional[bool] = None
    spec_string: str = field(default="", compare=False)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(np.asarray(self.kernel(x, y), dtype=float), np.broadcast(x, y).shape)

    @property
    def is_constant(self):
        return self.name == "constant"

    def __repr__(self):
        return f"Graphon({self.spec_string or self.name})"


# -- built-in family ----------------------------------------------------------


def constant(p):
    """Erdős–Rényi graphon W ≡ p."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"constant graphon needs p in [0,1], got {p}")
    return Graphon(
        kernel=lambda x, y: np.full(np.broadcast(x, y).shape, p),
        name="constant",
        params=(p,),
        D=lambda x: np.full(np.shape(x), p) if np.ndim(x) else p,
        dD=lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
        d2D=lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
        is_c3=True,
        monotone=False,
        spec_string=f"constant:{p!r}",
    )


def affine(a=0.0, b=1.0, epsilon0=None):
    """W(x,y) = a + b (x+y)/2.

    With a = 0, b = 1 this is the primary test graphon (x+y)/2.  It touches
    W = 1 at the corner (1,1), so its ε₀ is a grid-margin value: the bounds of
    the regularity condition hold on the interior midpoint grid only.
    """
    a, b = float(a), float(b)
    if a < 0 or a + b > 1 or b < 0:
        raise DomainError("affine graphon needs a >= 0, b >= 0, a + b <= 1")
    if epsilon0 is None:
        eps = min(a + b / 4, 1 - a - b)
        epsilon0 = eps if eps > 0 else 5e-4
    return Graphon(
        kernel=lambda x, y: a + b * (x + y) / 2,
        name="affine",
        params=(a, b),
        D=lambda x: a + b / 4 + b * np.asarray(x, dtype=float) / 2,
        dD=lambda x: np.full(np.shape(x), b / 2) if np.ndim(x) else b / 2,
        d2D=lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
        Dinv=(lambda d: (np.asarray(d, dtype=float) - a - b / 4) * 2 / b) if b > 0 else None,
        epsilon0=epsilon0 if b > 0 else None,
        is_c3=True,
        monotone=b > 0,
        spec_string=f"affine:{a!r},{b!r}",
    )


def product(eps=0.1):
    """W(x,y) = ε + (1-2ε) x y, which satisfies the regularity condition with ε₀ = ε."""
    eps = float(eps)
    if not 0 < eps < 0.5:
        raise DomainError("product graphon needs eps in (0, 1/2)")
    c = 1 - 2 * eps
    return Graphon(
        kernel=lambda x, y: eps + c * x * y,
        name="product",
        params=(eps,),
        D=lambda x: eps + c * np.asarray(x, dtype=float) / 2,
        dD=lambda x: np.full(np.shape(x), c / 2) if np.ndim(x) else c / 2,
        d2D=lambda x: np.zeros(np.shape(x)) if np.ndim(x) else 0.0,
        Dinv=lambda d: (np.asarray(d, dtype=float) - eps) * 2 / c,
        epsilon0=eps,
        is_c3=True,
        monotone=True,
        spec_string=f"product:{eps!r}",
    )


def from_expression(expr, epsilon0=None):
    """Kernel from a sympy expression in ``x`` and ``y``, e.g. ``"0.1 + 0.25*(x+y)"``."""
    import sympy

    x, y = sympy.symbols("x y", real=True)
    try:
        w = sympy.sympify(expr, locals={"x": x, "y": y})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise DomainError(f"cannot parse graphon expression {expr!r}: {exc}") from exc
    if w.free_symbols - {x, y}:
        raise DomainError(f"graphon expression uses unknown symbols {w.free_symbols - {x, y}}")

    def lam(e):
        f = sympy.lambdify((x, y), e, "numpy")
        return lambda a, b: np.asarray(f(a, b), dtype=float) * np.ones(np.broadcast(a, b).shape)

    g = Graphon(
        kernel=lam(w),
        name="expr",
        params=(str(w),),
        kernel_dx=lam(sympy.diff(w, x)),
        kernel_dxx=lam(sympy.diff(w, x, 2)),
        epsilon0=epsilon0,
        is_c3=True,
        spec_string=f"expr:{expr}",
    )
    grid = np.linspace(0, 1, 65)
    if np.max(np.abs(g(grid[:, None], grid[None, :]) - g(grid[None, :], grid[:, None]))) > 1e-12:
        raise DomainError(f"graphon expression {expr!r} is not symmetric")
    dprime = degree_prime(g, np.linspace(0, 1, 129))
    object.__setattr__(g, "monotone", bool(np.all(dprime > 0)))
    return g


def parse_graphon(text, epsilon0=None):
    """``constant:0.5``, ``affine``, ``affine:0,1``, ``product:0.1``, ``expr:<sympy>``."""
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    args = [float(v) for v in rest.split(",") if v.strip()] if kind != "expr" else []
    if kind == "constant":
        return constant(*(args or [0.5]))
    if kind == "affine":
        return affine(*args, epsilon0=epsilon0) if args else affine(epsilon0=epsilon0)
    if kind == "product":
        return product(*args) if args else product()
    if kind == "expr":
        return from_expression(rest, epsilon0=epsilon0)
    raise DomainError(f"unknown graphon kind {kind!r}")


# -- degree function ----------------------------------------------------------


def _row_integral(f, x):
    y, w = gauss_legendre(_DEG_NODES)
    x = np.asarray(x, dtype=float)
    vals = f(x[..., None], y)
    return vals @ w


def degree(W, x):
    """D(x) = ∫ W(x,y) dy."""
    if W.D is not None:
        return W.D(x)
    return _row_integral(W, x)


def degree_prime(W, x):
    if W.dD is not None:
        return W.dD(x)
    if W.kernel_dx is not None:
        return _row_integral(W.kernel_dx, x)
    h = 1e-5
    x = np.asarray(x, dtype=float)
    return (degree(W, x + h) - degree(W, x - h)) / (2 * h)


def degree_second(W, x):
    if W.d2D is not None:
        return W.d2D(x)
    if W.kernel_dxx is not None:
        return _row_integral(W.kernel_dxx, x)
    h = 1e-4
    x = np.asarray(x, dtype=float)
    return (degree(W, x + h) - 2 * degree(W, x) + degree(W, x - h)) / h**2


def degree_inverse(W, d, tol=1e-12, max_iter=200):
    """x with D(x) = d, for graphons whose degree function is increasing."""
    if not W.monotone:
        raise PreconditionError(f"{W!r} has no increasing degree function to invert")
    lo_v, hi_v = float(degree(W, 0.0)), float(degree(W, 1.0))
    if not lo_v - 1e-15 <= d <= hi_v + 1e-15:
        raise DomainError(f"degree {d} outside [D(0), D(1)] = [{lo_v}, {hi_v}]")
    if W.Dinv is not None:
        return float(np.clip(W.Dinv(d), 0.0, 1.0))
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = float(degree(W, mid))
        if abs(v - d) <= tol:
            break
        if v < d:
            lo = mid
        else:
            hi = mid
    return mid


# -- regularity ---------------------------------------------------------------


@dataclass
class RegularityReport:
    symmetric: bool
    in_range: bool
    bounded_above: bool
    degree_bounded_below: bool
    degree_increasing: bool
    max_asymmetry: float
    max_w: float
    min_d: float
    min_dprime: float

    @property
    def condition_holds(self):
        return self.symmetric and self.in_range and self.bounded_above and self.degree_bounded_below and self.degree_increasing


def check_regularity(W, grid=512, tol=1e-9, strict=False):
    """Sampled check of symmetry, range, and the ε₀ bounds with D' > 0.

    Uses the midpoint grid ``(i + 1/2)/grid``; a pointwise sample, not a proof.
    """
    x = (np.arange(grid) + 0.5) / grid
    vals = W(x[:, None], x[None, :])
    asym = float(np.max(np.abs(vals - vals.T)))
    d = np.asarray(degree(W, x), dtype=float)
    dp = np.asarray(degree_prime(W, x), dtype=float)
    eps = W.epsilon0
    rep = RegularityReport(
        symmetric=asym <= 1e-12,
        in_range=bool(vals.min() >= -tol and vals.max() <= 1 + tol),
        bounded_above=eps is not None and bool(vals.max() <= 1 - eps + tol),
        degree_bounded_below=eps is not None and bool(d.min() >= eps - tol),
        degree_increasing=bool(dp.min() > 0),
        max_asymmetry=asym,
        max_w=float(vals.max()),
        min_d=float(d.min()),
        min_dprime=float(dp.min()),
    )
    if strict and not rep.condition_holds:
        raise RegularityError(f"{W!r} fails the sampled regularity check: {rep}")
    return rep


def require_regular(W):
    rep = check_regularity(W, grid=128)
    if not rep.degree_increasing:
        raise RegularityError(f"{W!r}: D' is not positive (min {rep.min_dprime:.3g})")
    if not rep.condition_holds:
        raise RegularityError(f"{W!r} fails the sampled regularity check: {rep}")
    return rep


# -- integral densities -------------------------------------------------------


def _integrate(p, edges, W, q, complement=(), tag=""):
    if p <= q.dim_switch:
        return float(contract(p, edges, W, q, complement_edges=complement))
    mean, _ = monte_carlo(p, edges, W, q, complement_edges=complement, tag=tag)
    return mean


def _tag(kind, graph):
    return f"{kind}:{graph.p}:{graph.sorted_edges()}"


def t_graphon(F, W, q: QuadratureSpec = DEFAULT):
    """t(F, W) = ∫ ∏_{ij ∈ E(F)} W(x_i, x_j) dx."""
    if F.p == 0:
        return 1.0
    return _integrate(F.p, F.sorted_edges(), W, q, tag=_tag("t", F))


def t_ind_graphon(F, W, q: QuadratureSpec = DEFAULT):
    """Induced density: edges weighted by W, non-edges by 1 - W."""
    if F.p == 0:
        return 1.0
    return _integrate(F.p, F.sorted_edges(), W, q, complement=F.non_edges(), tag=_tag("ind", F))


def t_ind_by_supergraphs(F, W, q: QuadratureSpec = DEFAULT):
    """Σ_{F' ≥ F} (-1)^{e(F')-e(F)} t(F', W)."""
    return sum((-1) ** s * t_graphon(G, W, q) for G, s in supergraphs(F))


@dataclass(frozen=True)
class RootedDensity:
    t: np.ndarray
    hat: np.ndarray
    tilde: np.ndarray


def t_x_rooted(motif: LabeledMotif, W, x, q: QuadratureSpec = DEFAULT):
    """(t_x, hat t_x, tilde t_x) at one point ``x`` of [0,1]^k or a batch of shape (B, k)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    xb = np.atleast_2d(x)
    if xb.shape[1] != motif.k:
        raise DomainError(f"point has {xb.shape[1]} coordinates, motif has {motif.k} labels")
    if np.any((xb < 0) | (xb > 1)):
        raise DomainError("coordinates must lie in [0, 1]")
    hat = np.ones(xb.shape[0])
    for a, b in motif.labeled_edges():
        hat = hat * W(xb[:, a], xb[:, b])
    if motif.k == 0:
        tilde = np.full(1, t_graphon(motif.graph, W, q))
    else:
        fixed = {v: xb[:, a] for a, v in enumerate(motif.labels)}
        tilde = np.asarray(contract(motif.p, motif.free_edges(), W, q, fixed=fixed), dtype=float)
    t = hat * tilde
    if single:
        return RootedDensity(float(t[0]), float(hat[0]), float(tilde[0]))
    return RootedDensity(t, hat, tilde)


def tilde_on_grid(motif: LabeledMotif, W, q: QuadratureSpec = DEFAULT, extra=()):
    """tilde t on the tensor node grid: axes follow ``labels + extra`` vertices.

    ``extra`` vertices are unlabeled vertices kept free as well (used for
    t_{xU}(F^{lq}, W)); edges among ``labels`` are excluded.
    """
    return contract(motif.p, motif.free_edges(), W, q, free=tuple(motif.labels) + tuple(extra))


def hat_on_grid(motif: LabeledMotif, W, q: QuadratureSpec = DEFAULT):
    """hat t on the node grid, axes in label order."""
    k = motif.k
    return contract(k, [(a + 1, b + 1) for a, b in motif.labeled_edges()], W, q, free=tuple(range(1, k + 1)))
