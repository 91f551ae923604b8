"""Seeded Monte Carlo experiments, flat config files, CSV and SVG output.

Replicate ``r`` at size ``n`` draws its graph from ``derive_seed(master, n, r)``
and writes its statistic into slot ``r``, so aggregates do not depend on the
order in which replicates run or on how they are split across workers.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from scipy import stats

from . import binom, rng
from .degree_cdf import c_n_exact, empirical_cdf, sigma_kernel
from .errors import ConfigError, DomainError, PreconditionError, RegularityError
from .fluctuation import er_scaling_target, gamma_limit, gamma_n, parse_test_function, sigma2_clt
from .graphon import check_regularity, parse_graphon
from .graphs import MotifFamily, load_graph
from .hom import t_inj
from .sampler import sample

KINDS = ("lln", "clt", "er-scaling", "degree-cdf", "binom-sweep")
CSV_HEADER = ("n", "statistic", "empirical", "target", "se", "z", "runtime_ms")


# -- configuration ------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "clt"
    graphon: str = "affine"
    epsilon0: float | None = None
    motif: str = "K2"
    labels: tuple = (1,)
    g: str = "id"
    n_list: tuple = (200,)
    reps: int = 2000
    seed: int = 0
    y: tuple = (0.5,)
    out: str = "."
    threads: int = 1
    sigmas: float = 3.0
    floor: float = 0.02
    abs_tol: float = 0.02
    alpha_budget: int = 10**6
    p: float = 0.5
    sweep: str = "edgeworth"
    alpha: float = 3.0

    def validate(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}", field="kind")
        if self.reps < 2:
            raise ConfigError("need at least 2 replicates", field="reps")
        if not self.n_list:
            raise ConfigError("empty n list", field="n_list")
        if any(b <= a for a, b in zip(self.n_list[:-1], self.n_list[1:])):
            raise ConfigError("n list must be strictly increasing", field="n_list")
        if any(n < 2 for n in self.n_list):
            raise ConfigError("every n must be >= 2", field="n_list")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1", field="threads")
        if any(not 0 < v < 1 for v in self.y):
            raise ConfigError("y values must lie in (0, 1)", field="y")
        return self


def _ints(v):
    return tuple(int(x) for x in str(v).replace(" ", "").split(",") if x)


def _floats(v):
    return tuple(float(x) for x in str(v).replace(" ", "").split(",") if x)


def _seed(v):
    s = int(str(v), 0)
    if not 0 <= s < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return s


_PARSERS = {
    "kind": str,
    "graphon": str,
    "epsilon0": float,
    "motif": str,
    "labels": _ints,
    "g": str,
    "n_list": _ints,
    "reps": int,
    "seed": _seed,
    "y": _floats,
    "out": str,
    "threads": int,
    "sigmas": float,
    "floor": float,
    "abs_tol": float,
    "alpha_budget": int,
    "p": float,
    "sweep": str,
    "alpha": float,
}

_ALIASES = {
    "n": "n_list",
    "n-list": "n_list",
    "n_list": "n_list",
    "replicates": "reps",
    "r": "reps",
    "tol.sigmas": "sigmas",
    "tol.floor": "floor",
    "tol.abs": "abs_tol",
    "graphon.epsilon0": "epsilon0",
    "alpha-budget": "alpha_budget",
    "test_function": "g",
    "family": "motif",
}


def _key(raw):
    k = raw.strip().lower()
    k = _ALIASES.get(k, k)
    return k.replace("-", "_")


def parse_config_text(text):
    """``key = value`` lines; ``#`` starts a comment.  Returns {field: (value, line)}."""
    out = {}
    graphon_kind = graphon_params = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        k, v = (s.strip() for s in line.split("=", 1))
        key = k.lower()
        if key == "graphon.kind":
            graphon_kind = (v, lineno)
            continue
        if key == "graphon.params":
            graphon_params = (v, lineno)
            continue
        key = _key(k)
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {k!r}", field=k, line=lineno)
        try:
            out[key] = (_PARSERS[key](v), lineno)
        except ValueError as exc:
            raise ConfigError(f"bad value {v!r}: {exc}", field=k, line=lineno) from None
    if graphon_kind is not None:
        spec = graphon_kind[0]
        if graphon_params is not None:
            spec = f"{spec}:{graphon_params[0]}"
        out["graphon"] = (spec, graphon_kind[1])
    return out


def load_config(path=None, overrides=None):
    """File values first, then non-None ``overrides``; the result is validated."""
    values = {}
    lines = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        for k, (v, ln) in parse_config_text(text).items():
            values[k] = v
            lines[k] = ln
    for k, v in (overrides or {}).items():
        if v is not None:
            key = _key(k)
            if key not in _PARSERS:
                raise ConfigError(f"unknown option {k!r}", field=k)
            values[key] = v
            lines.pop(key, None)
    try:
        cfg = ExperimentConfig(**values)
        return cfg.validate()
    except ConfigError as exc:
        if exc.field in lines and exc.line is None:
            raise ConfigError(exc.bare, field=exc.field, line=lines[exc.field]) from None
        raise


def config_to_text(cfg):
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        if v is None:
            continue
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


# -- report -------------------------------------------------------------------


@dataclass
class Row:
    n: object
    statistic: str
    empirical: float
    target: float
    se: float
    tolerance: float | None = None
    runtime_ms: float = 0.0
    upper: float | None = None  # one-sided gate: empirical < upper

    @property
    def z(self):
        if self.se and self.se > 0 and math.isfinite(self.target):
            return (self.empirical - self.target) / self.se
        return float("nan")

    @property
    def gated(self):
        return self.tolerance is not None or self.upper is not None

    @property
    def passed(self):
        if self.upper is not None and not self.empirical < self.upper:
            return False
        if self.tolerance is not None:
            return abs(self.empirical - self.target) <= self.tolerance
        return True


@dataclass
class ExperimentReport:
    kind: str
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def row(self, statistic, n=None):
        for r in self.rows:
            if r.statistic == statistic and (n is None or r.n == n):
                return r
        raise KeyError(statistic)


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def to_csv(report, include_runtime=True):
    if not report.rows:
        raise PreconditionError("empty report")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in report.rows:
        w.writerow([
            _fmt(r.n), r.statistic, _fmt(r.empirical), _fmt(r.target), _fmt(r.se), _fmt(r.z),
            f"{r.runtime_ms:.1f}" if include_runtime else "",
        ])
    return buf.getvalue()


def to_svg(report):
    """Log-log plot of |empirical - target| against n, one series per statistic."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not report.rows:
        raise PreconditionError("empty report")
    series = {}
    for r in report.rows:
        if isinstance(r.n, (int, np.integer)):
            series.setdefault(r.statistic, []).append((int(r.n), abs(r.empirical - r.target)))
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, pts in series.items():
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [max(p[1], 1e-300) if math.isfinite(p[1]) else np.nan for p in pts]
        (line,) = ax.plot(xs, ys, marker="o", label=name)
        line.set_gid(f"series-{name}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("|empirical - target|")
    ax.set_title(report.kind)
    if series:
        ax.legend(fontsize="small")
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def emit(report, out_dir, formats=("csv", "svg")):
    """Write ``<kind>.csv`` / ``<kind>.svg`` into ``out_dir``; returns the paths."""
    if not report.rows:
        raise PreconditionError("empty report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for fmt in formats:
        path = out / f"{report.kind}.{fmt}"
        text = to_csv(report) if fmt == "csv" else to_svg(report)
        path.write_text(text)
        paths.append(path)
    return paths


# -- replicate machinery ------------------------------------------------------


def _family(cfg):
    """``motif`` holds one graph spec or several separated by ``;``."""
    graphs = [load_graph(s.strip()) for s in cfg.motif.split(";") if s.strip()]
    if not graphs:
        raise ConfigError("empty motif family", field="motif")
    return MotifFamily.of(graphs, cfg.labels)


def _replicate_values(cfg, n, reps):
    """Per-replicate statistic rows for one n (runs inside workers too)."""
    W = parse_graphon(cfg.graphon, cfg.epsilon0)
    out = []
    if cfg.kind in ("clt", "lln"):
        fam = _family(cfg)
        g = parse_test_function(cfg.g, W)
        for r in reps:
            G = sample(W, n, rng.derive_seed(cfg.seed, n, r))
            out.append([gamma_n(fam, g, G, cfg.alpha_budget, seed=rng.derive_seed(cfg.seed, n, r, 1)).value])
    elif cfg.kind == "er-scaling":
        F = load_graph(cfg.motif)
        for r in reps:
            G = sample(W, n, rng.derive_seed(cfg.seed, n, r))
            out.append([t_inj(F, G)])
    elif cfg.kind == "degree-cdf":
        for r in reps:
            G = sample(W, n, rng.derive_seed(cfg.seed, n, r))
            out.append(list(np.atleast_1d(empirical_cdf(G, W, np.array(cfg.y)))))
    else:
        raise DomainError(f"{cfg.kind} has no replicates")
    return out


def _worker(args):
    cfg, n, lo, hi = args
    return lo, _replicate_values(cfg, n, range(lo, hi))


def run_replicates(cfg, n):
    """(reps, m) array of statistics; slot r always holds replicate r."""
    R = cfg.reps
    if cfg.threads <= 1:
        vals = _replicate_values(cfg, n, range(R))
        return np.asarray(vals, dtype=float)
    chunk = max(1, math.ceil(R / (4 * cfg.threads)))
    jobs = [(cfg, n, lo, min(lo + chunk, R)) for lo in range(0, R, chunk)]
    slots = [None] * R
    with ProcessPoolExecutor(max_workers=cfg.threads) as ex:
        for lo, vals in ex.map(_worker, jobs):
            for i, v in enumerate(vals):
                slots[lo + i] = v
    return np.asarray(slots, dtype=float)


def _variance_row(n, name, values, target, cfg, ms, degenerate_ok=True):
    R = values.shape[0]
    emp = float(np.var(values, ddof=1))
    if target > 1e-12:
        se = target * math.sqrt(2 / (R - 1))
        tol = cfg.sigmas * se + cfg.floor * target
    elif degenerate_ok:
        # a degenerate limit: the variance must be small in absolute terms
        se = emp * math.sqrt(2 / (R - 1))
        tol = cfg.abs_tol
    else:
        se, tol = float("nan"), None
    return Row(n, name, emp, target, se, tol, ms)


def _diagnostic_rows(n, z, ms):
    R = z.shape[0]
    rows = [
        Row(n, "skewness", float(stats.skew(z)), 0.0, math.sqrt(6 / R), None, ms),
        Row(n, "excess_kurtosis", float(stats.kurtosis(z)), 0.0, math.sqrt(24 / R), None, ms),
    ]
    if np.std(z) > 0:
        ad = stats.anderson(z, dist="norm")
        stat = float(ad.statistic)
        crit = float(ad.critical_values[list(ad.significance_level).index(5.0)])
    else:
        stat = crit = float("nan")
    rows.append(Row(n, "anderson_darling", stat, crit, float("nan"), None, ms))
    return rows


# -- experiments --------------------------------------------------------------


def run_clt(cfg):
    """√n(Γ_n(g) - Γ(g)) over replicates; variance against σ²(g)."""
    cfg = replace(cfg, kind="clt").validate()
    W = parse_graphon(cfg.graphon, cfg.epsilon0)
    fam = _family(cfg)
    g = parse_test_function(cfg.g, W)
    limit = gamma_limit(fam, g, W)
    target = sigma2_clt(fam, g, W).sigma2 if g.gradient is not None else float("nan")
    rep = ExperimentReport("clt", cfg)
    for n in cfg.n_list:
        t0 = time.perf_counter()
        vals = run_replicates(cfg, n)[:, 0]
        ms = (time.perf_counter() - t0) * 1e3
        z = math.sqrt(n) * (vals - limit)
        R = len(z)
        rep.rows.append(Row(n, "mean", float(z.mean()), 0.0, float(z.std(ddof=1)) / math.sqrt(R), None, ms))
        if math.isfinite(target):
            rep.rows.append(_variance_row(n, "variance", z, target, cfg, ms))
        rep.rows.extend(_diagnostic_rows(n, z, ms))
    return rep


def run_er_scaling(cfg):
    """n(t_inj(F, G_n) - p^e) for W ≡ p against 2e²p^{2e-1}(1-p)."""
    cfg = replace(cfg, kind="er-scaling").validate()
    W = parse_graphon(cfg.graphon, cfg.epsilon0)
    if not W.is_constant:
        raise PreconditionError("the n-scaling experiment needs a constant graphon")
    p = W.params[0]
    F = load_graph(cfg.motif)

    target = er_scaling_target(F, p)
    mean = p**F.e
    rep = ExperimentReport("er-scaling", cfg)
    for n in cfg.n_list:
        t0 = time.perf_counter()
        vals = run_replicates(cfg, n)[:, 0]
        ms = (time.perf_counter() - t0) * 1e3
        z = n * (vals - mean)
        rep.rows.append(_variance_row(n, "variance_n", z, target, cfg, ms))
        rep.rows.append(_variance_row(n, "variance_sqrt_n", math.sqrt(n) * (vals - mean), 0.0, cfg, ms))
        rep.rows.extend(_diagnostic_rows(n, z, ms))
    return rep


def run_degree_cdf(cfg):
    """√n(Π_n(y) - y) on a y grid; covariance against Σ, centering against c_{n-1}."""
    cfg = replace(cfg, kind="degree-cdf").validate()
    W = parse_graphon(cfg.graphon, cfg.epsilon0)
    reg = check_regularity(W, grid=128)
    if not reg.degree_increasing:
        raise RegularityError(f"{W!r}: D' is not positive, the degree CDF has no Gaussian limit")
    ys = cfg.y
    m = len(ys)
    sig = np.array([[sigma_kernel(W, a, b).total for b in ys] for a in ys])
    rep = ExperimentReport("degree-cdf", cfg)
    for n in cfg.n_list:
        t0 = time.perf_counter()
        vals = run_replicates(cfg, n)
        ms = (time.perf_counter() - t0) * 1e3
        R = vals.shape[0]
        z = math.sqrt(n) * (vals - np.array(ys)[None, :])
        cov = np.cov(z, rowvar=False, ddof=1).reshape(m, m)
        for i in range(m):
            for j in range(i, m):
                se = math.sqrt((sig[i, i] * sig[j, j] + sig[i, j] ** 2) / (R - 1))
                tol = cfg.sigmas * se + cfg.floor * abs(sig[i, j])
                rep.rows.append(Row(n, f"cov[{ys[i]!r},{ys[j]!r}]", float(cov[i, j]), float(sig[i, j]), se, tol, ms))
        for i, y in enumerate(ys):
            c = c_n_exact(W, n - 1, y)
            d = vals[:, i] - c
            se = float(d.std(ddof=1)) / math.sqrt(R)
            rep.rows.append(Row(n, f"centering[{y!r}]", float(d.mean()), 0.0, se, cfg.sigmas * se, ms))
    return rep


def run_lln(cfg):
    """Median |Γ_n(g) - Γ(g)| over replicates; gated on strict decrease along n."""
    cfg = replace(cfg, kind="lln").validate()
    W = parse_graphon(cfg.graphon, cfg.epsilon0)
    fam = _family(cfg)
    g = parse_test_function(cfg.g, W)
    limit = gamma_limit(fam, g, W)
    rep = ExperimentReport("lln", cfg)
    prev = None
    for n in cfg.n_list:
        t0 = time.perf_counter()
        vals = run_replicates(cfg, n)[:, 0]
        ms = (time.perf_counter() - t0) * 1e3
        med = float(np.median(np.abs(vals - limit)))
        rep.rows.append(Row(n, "median_abs_error", med, 0.0, float("nan"), None, ms, upper=prev))
        prev = med
    return rep


# -- binomial sweeps ----------------------------------------------------------


def run_binom_sweep(cfg):
    """Residuals of the binomial expansions against the exact CDF for each n."""
    cfg = replace(cfg, kind="binom-sweep").validate()
    p = cfg.p
    rep = ExperimentReport("binom-sweep", cfg)
    if cfg.sweep == "edgeworth":
        xs = np.linspace(-3, 3, 61)
        for n in cfg.n_list:
            t0 = time.perf_counter()
            evs = [binom.edgeworth_cdf(n, p, float(x)) for x in xs]
            ms = (time.perf_counter() - t0) * 1e3
            ratio = max(e.error / e.error_bound for e in evs if e.in_region) if any(e.in_region for e in evs) else float("nan")
            rep.rows.append(Row(n, "max_error", max(e.error for e in evs), max(e.error_bound for e in evs), float("nan"),
                                None, ms))
            gate = 1.0 if math.isfinite(ratio) else None
            rep.rows.append(Row(n, "max_error_over_bound", ratio, 0.0, float("nan"), gate, ms))
    elif cfg.sweep == "approx":
        res = []
        for n in cfg.n_list:
            t0 = time.perf_counter()
            a = math.sqrt(math.log(n))
            ss = np.linspace(-a, a, 41)
            r = max(abs(binom.cdf_approx(n, p, 0.0, float(s)).value - binom.exact_cdf(n, p, 0.0, p + s / math.sqrt(n)))
                    for s in ss)
            ms = (time.perf_counter() - t0) * 1e3
            res.append(r)
            rep.rows.append(Row(n, "max_residual", r, math.log(n) ** 2 / n, float("nan"), None, ms))
        if len(cfg.n_list) >= 2:
            slope = binom.fit_loglog_slope(cfg.n_list, res)
            rep.rows.append(Row("all", "fitted_exponent", slope, -1.025, float("nan"), 0.225, 0.0))
    elif cfg.sweep == "tail":
        for n in cfg.n_list:
            t0 = time.perf_counter()
            gap = cfg.alpha * math.sqrt(math.log(n)) / math.sqrt(n)
            us = [u for u in np.linspace(0.01, 0.99, 99) if abs(u - p) >= gap]
            worst = 0.0
            for u in us:
                h = binom.exact_cdf(n, p, 0.0, float(u))
                worst = max(worst, abs(h - (1.0 if u <= p else 0.0)))
            ms = (time.perf_counter() - t0) * 1e3
            bound = n ** (2 - cfg.alpha)
            rep.rows.append(Row(n, "max_tail_error", worst, 0.0, float("nan"), bound if us else None, ms))
    else:
        raise ConfigError(f"unknown sweep {cfg.sweep!r}", field="sweep")
    return rep


RUNNERS = {
    "clt": run_clt,
    "er-scaling": run_er_scaling,
    "degree-cdf": run_degree_cdf,
    "lln": run_lln,
    "binom-sweep": run_binom_sweep,
}


def run(cfg):
    try:
        return RUNNERS[cfg.kind](cfg)
    except KeyError:
        raise ConfigError(f"unknown experiment kind {cfg.kind!r}", field="kind") from None
