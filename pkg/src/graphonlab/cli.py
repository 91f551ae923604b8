"""Command line front end: ``graphonlab <subcommand> ...``.

Exit status is 0 when every gated row passes, 1 when one breaches its
tolerance and 2 for configuration or input errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .errors import ConfigError, GraphonLabError
from .graphon import parse_graphon
from .graphs import LabeledMotif, load_graph
from .hom import hom_count, t_inj_rooted
from .sampler import sample

EXIT_OK, EXIT_BREACH, EXIT_CONFIG = 0, 1, 2


def _u64(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _csv_ints(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _csv_floats(text):
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--seed", type=_u64)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", help="output directory (or file for sample/density)")
    p.add_argument("--no-svg", action="store_true", help="skip the SVG plot")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    ap = _Parser(prog="graphonlab", description="W-random graph experiments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw one W-random graph")
    _common(p)
    p.add_argument("--graphon", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--latent-out")

    p = sub.add_parser("density", help="homomorphism densities of a motif in a host")
    _common(p)
    p.add_argument("--motif", required=True, help="edge-list file or name such as K3")
    p.add_argument("--host", required=True, help="edge-list file or name")
    p.add_argument("--labels", type=_csv_ints, default=())
    p.add_argument("--root", type=_csv_ints, default=())
    p.add_argument("--mode", choices=("hom", "inj", "ind", "rooted"), default="inj")

    for name, kind in (("clt", "clt"), ("lln", "lln")):
        p = sub.add_parser(name, help=f"{kind} experiment for motif densities")
        _common(p)
        p.add_argument("--family", "--motif", dest="motif", help="motif specs separated by ';'")
        p.add_argument("--labels", type=_csv_ints)
        p.add_argument("--g")
        p.add_argument("--graphon")
        p.add_argument("--n", "--n-list", dest="n_list", type=_csv_ints)
        p.add_argument("--reps", type=int)
        p.add_argument("--alpha-budget", type=int)

    p = sub.add_parser("er-scaling", help="n-rescaled fluctuations for constant graphons")
    _common(p)
    p.add_argument("--motif")
    p.add_argument("--graphon")
    p.add_argument("--n", "--n-list", dest="n_list", type=_csv_ints)
    p.add_argument("--reps", type=int)

    p = sub.add_parser("degree-cdf", help="covariance of the empirical degree CDF")
    _common(p)
    p.add_argument("--graphon")
    p.add_argument("--y", type=_csv_floats)
    p.add_argument("--n", "--n-list", dest="n_list", type=_csv_ints)
    p.add_argument("--reps", type=int)

    p = sub.add_parser("binom-check", help="binomial CDF expansions against the exact CDF")
    _common(p)
    p.add_argument("--n-list", "--n", dest="n_list", type=_csv_ints)
    p.add_argument("--p", type=float)
    p.add_argument("--sweep", choices=("edgeworth", "approx", "tail"))
    p.add_argument("--alpha", type=float)
    return ap


_KIND = {"clt": "clt", "lln": "lln", "er-scaling": "er-scaling", "degree-cdf": "degree-cdf",
         "binom-check": "binom-sweep"}
_NOT_CONFIG = {"command", "config", "no_svg"}


def _write(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_sample(args):
    G = sample(parse_graphon(args.graphon), args.n, args.seed or 0)
    _write(G.to_edgelist(), args.out)
    if args.latent_out:
        Path(args.latent_out).write_text(G.latent_csv())
    return EXIT_OK


def _cmd_density(args):
    F = load_graph(args.motif)
    G = load_graph(args.host)
    if args.mode == "rooted":
        rc = t_inj_rooted(LabeledMotif(F, args.labels), G, args.root)
        val = rc.exact()
        text = f"hat {rc.hat}\ntilde {rc.tilde_count}/{rc.denom}\ndensity {val} {float(val)!r}\n"
    else:
        count = hom_count(F, G, args.mode)
        from math import perm

        denom = G.p**F.p if args.mode == "hom" else perm(G.p, F.p)
        val = Fraction(count, denom) if denom else Fraction(0)
        text = f"count {count}\ndensity {val} {float(val)!r}\n"
    _write(text, args.out)
    return EXIT_OK


def _cmd_experiment(args):
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    overrides["kind"] = _KIND[args.command]
    cfg = ex.load_config(args.config, overrides)
    report = ex.run(cfg)
    formats = ("csv",) if args.no_svg else ("csv", "svg")
    paths = ex.emit(report, cfg.out, formats)
    for r in report.rows:
        flag = "" if not r.gated else ("  ok" if r.passed else "  BREACH")
        print(f"{r.n!s:>6} {r.statistic:<28} {r.empirical:.6g} (target {r.target:.6g}){flag}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_BREACH


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sample":
            return _cmd_sample(args)
        if args.command == "density":
            return _cmd_density(args)
        return _cmd_experiment(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GraphonLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
