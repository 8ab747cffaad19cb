"""Command-line front end: ``warpfinsler {verify,scan-convexity,point,oracle}``.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 on usage or domain errors.
"""

import argparse
import json
import sys

from . import __version__
from .campaign import (CHECKS, DEFAULT_TOLERANCES, CampaignSpec, cmd_oracle, cmd_point,
                       cmd_scan_convexity, cmd_verify)
from .errors import WarpFinslerError
from .expr import GRAMMAR_VERSION, ExpressionError
from .families import PRESET_NAMES

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FD_CHECKS = ("projflat", "oracle-hessian", "oracle-spray", "oracle-divergence",
             "oracle-douglas", "oracle-berwald")

GRAMMAR_HELP = (f"Functions are expressions in one variable (grammar v{GRAMMAR_VERSION}): "
                "+ - * / ^, sqrt exp ln arctan sin cos, constants pi e; e.g. 'sqrt(t^2+0.5)+0.3*t'.")


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _pair(text):
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    return tuple(vals)


def _add_family_args(p):
    g = p.add_argument_group("family", GRAMMAR_HELP)
    sel = g.add_mutually_exclusive_group(required=True)
    sel.add_argument("--preset", choices=PRESET_NAMES)
    sel.add_argument("--family", choices=("g-family", "randers", "gc-family", "flat"))
    g.add_argument("--h", help="warping function h(r) of the g-family")
    g.add_argument("--G", help="profile G(t) of the g-family or flat family")
    g.add_argument("--f", help="Randers f(r)")
    g.add_argument("--g", help="Randers g(r), or the warping g(r) of gc-family and example presets")
    g.add_argument("--b", help="Randers drift b (constant or function of r)")
    g.add_argument("--kernel", help="kernel of the double integral G_c")
    g.add_argument("--c", type=float, help="integration constant c of G_c")
    g.add_argument("--L", type=float, help="asserted upper bound of int_0^t tau k(tau) dtau")
    g.add_argument("--rho", type=float, help="radius of the ball (default 1)")
    g.add_argument("--r-min", type=float, help="smallest admissible r (default 0.05 rho)")


def _add_campaign_args(p, checks=True):
    p.add_argument("--n", type=int, default=3, help="dimension of xbar (default 3)")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-range", type=_pair, help="sampling range of r, e.g. '0.1,0.9'")
    p.add_argument("--y0-range", type=_pair, default=(-2.0, 2.0))
    p.add_argument("--u-range", type=_pair, default=(0.5, 2.0))
    if checks:
        p.add_argument("--checks", default="douglas",
                       help=f"comma-separated subset of {', '.join(CHECKS)}")
    p.add_argument("--tol-closed", type=float, help="tolerance for every closed-form check")
    p.add_argument("--tol-fd", type=float, help="tolerance for every finite-difference check")
    for name in DEFAULT_TOLERANCES:
        p.add_argument(f"--tol-{name}", type=float, dest=f"tol_{name.replace('-', '_')}",
                       help=f"default {DEFAULT_TOLERANCES[name]:g}")
    p.add_argument("--strict", action="store_true",
                   help="abort on the first invalid sampled point instead of reporting it")
    p.add_argument("--workers", type=int, default=1)
    _add_output_args(p)
    p.add_argument("--per-point", metavar="PATH", help="also write per-point values as CSV")


def _add_output_args(p):
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="warpfinsler",
        description="Verify curvature identities of warped product Finsler metrics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run checks at random points")
    _add_family_args(p)
    _add_campaign_args(p)

    p = sub.add_parser("oracle", help="compare closed forms with finite differences")
    _add_family_args(p)
    _add_campaign_args(p, checks=False)

    p = sub.add_parser("scan-convexity", help="scan Omega, Lambda over a (z, r) grid")
    _add_family_args(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-range", type=_pair)
    p.add_argument("--z-count", type=int, default=61)
    p.add_argument("--r-count", type=int, default=20)
    _add_output_args(p)

    p = sub.add_parser("point", help="dump every tensor at one point")
    _add_family_args(p)
    p.add_argument("--x", type=_floats, required=True, help="x = (x0, xbar), comma-separated")
    p.add_argument("--y", type=_floats, required=True, help="y = (y0, ybar), comma-separated")
    p.add_argument("--out", metavar="PATH")
    return parser


def _selector(args):
    if args.preset:
        sel = {"preset": args.preset}
        for key in ("g", "c"):
            if getattr(args, key) is not None:
                sel[key] = getattr(args, key)
    else:
        sel = {"kind": args.family}
        for key in ("h", "G", "f", "g", "b", "kernel", "c", "L"):
            if getattr(args, key) is not None:
                sel[key] = getattr(args, key)
    for key in ("rho", "r_min"):
        if getattr(args, key) is not None:
            sel[key] = getattr(args, key)
    return sel


def _tolerances(args):
    tol = {}
    for name in DEFAULT_TOLERANCES:
        group = args.tol_fd if name in FD_CHECKS else args.tol_closed
        if name == "convexity":
            group = None
        if group is not None:
            tol[name] = group
        specific = getattr(args, f"tol_{name.replace('-', '_')}")
        if specific is not None:
            tol[name] = specific
    return tol


def _spec(args, checks):
    return CampaignSpec(
        family=_selector(args), n=args.n, samples=args.samples, seed=args.seed,
        r_range=args.r_range, y0_range=args.y0_range, u_range=args.u_range,
        tolerances=_tolerances(args), checks=checks, strict=args.strict)


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(report, args):
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    if getattr(args, "per_point", None):
        _emit(report.per_point_csv(), args.per_point)
    for c in report.checks:
        status = "pass" if c["pass"] else "FAIL"
        print(f"{c['name']}: {status} sup={c['sup_norm']} tol={c['tolerance']}", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


def run(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
        return _emit_report(cmd_verify(_spec(args, checks), args.workers), args)
    if args.command == "oracle":
        return _emit_report(cmd_oracle(_spec(args, ("oracle",)), args.workers), args)
    if args.command == "scan-convexity":
        spec = CampaignSpec(family=_selector(args), n=args.n, seed=args.seed, r_range=args.r_range,
                            checks=("convexity",))
        return _emit_report(cmd_scan_convexity(spec, args.z_count, args.r_count), args)
    out = cmd_point(_selector(args), args.x, args.y)
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_PASS


def main(argv=None):
    try:
        return run(argv)
    except (WarpFinslerError, ExpressionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
