"""Command line entry point: ``eqdist <subcommand> ...``."""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import harness, rngdist, stats
from .rngdist import parse_dist


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _complex(text: str) -> complex:
    try:
        re_, im = text.split(",")
        return complex(float(re_), float(im))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected re,im, got {text!r}") from None


def _dist(text: str):
    try:
        return parse_dist(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _ensemble(text: str):
    try:
        return harness.EnsembleSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    threads = argparse.ArgumentParser(add_help=False)
    threads.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                         help="worker count (default: $EQDIST_THREADS or 1; 0 = all cores)")
    ap = _Parser(prog="eqdist", parents=[threads], description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("run", parents=[threads], help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--output-dir", help="override output_dir from the config")

    p = sub.add_parser("roots", help="roots of a single draw as CSV")
    p.add_argument("--ensemble", type=_ensemble, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", type=_dist, default=rngdist.DistributionSpec.gaussian())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out", help="write to this file instead of stdout")

    p = sub.add_parser("tail-check", help="integrability classification and tail table")
    p.add_argument("--dist", type=_dist, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("cover-check", help="covering number of normalized coefficient points")
    p.add_argument("--array", required=True, help="array label: kac, flat, elliptic, exp-decay, weighted:R")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", type=_complex, required=True)
    p.add_argument("--eps", type=float, required=True, help="ball radius is exp(-eps n)")

    p = sub.add_parser("potential-grid", help="(1/n) log|p| and the limit on the default grid")
    p.add_argument("--ensemble", type=_ensemble, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dist", type=_dist, default=rngdist.DistributionSpec.gaussian())
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--out")
    return ap


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _draw(args):
    ens = args.ensemble
    if ens.family == "kac2":
        raise harness.ConfigError("--ensemble: kac2 has no one-variable roots or radial grid")
    if args.n < 1:
        raise harness.ConfigError("--n: must be >= 1")
    return ens, ens.draw(args.n, ens.structure(args.n), args.dist, args.seed, args.trial,
                         key=(args.n, args.trial))


def cmd_run(args) -> int:
    cfg = harness.load_config(args.config)
    result = harness.run(cfg, threads=getattr(args, "threads", None))
    out = args.output_dir or cfg.output_dir or "."
    harness.emit(result, out)
    for row in result.per_degree():
        parts = [f"n={row['n']}", f"ok={row['successes']}"]
        parts += [f"{k}={v}" for k, v in row["failures"].items() if v]
        for name, agg in row["stats"].items():
            if agg["median"] is not None:
                parts.append(f"{name}.median={agg['median']:.4g}")
        print(" ".join(parts))
    print(f"wrote {out}/summary.json")
    return 0


def cmd_roots(args) -> int:
    from .roots import find_roots

    _, p = _draw(args)
    rs = find_roots(p)
    _write(harness.roots_csv(rs.roots), args.out)
    return 0


def cmd_tail_check(args) -> int:
    cond = rngdist.classify_conditions(args.dist, d=args.d)
    print(f"dist={args.dist.canonical_name()} d={args.d}")
    print(f"meas_holds={str(cond.meas_holds).lower()}")
    print(f"elog_power_finite={str(cond.elog_power_finite).lower()}")
    lp = rngdist.sample_logpolar(args.dist, rngdist.stream(args.seed, 0), args.samples)
    grid = np.array([0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0])
    print("t,empirical,exact")
    for t, emp, exact in rngdist.empirical_tail_report(lp, grid, args.dist):
        print(f"{t:g},{emp:.6g},{'' if exact is None else f'{exact:.6g}'}")
    return 0


def cmd_cover_check(args) -> int:
    ens = _ensemble(f"array:{args.array}")
    arr = ens.structure(args.n)
    pts = stats.normalized_coefficient_points(arr, args.z)
    radius = math.exp(-args.eps * args.n)
    count = stats.covering_number(pts, radius)
    print(f"n={args.n} radius={radius:.6g} points={pts.size} covering_number={count}")
    return 0


def cmd_potential_grid(args) -> int:
    from .ensembles import log_abs_eval

    ens, p = _draw(args)
    grid = stats.default_grid()
    u = log_abs_eval(p, grid.points) / p.n
    v = ens.limit().potential(grid.points)
    lines = ["re,im,u,V"]
    for z, a, b in zip(grid.points, u, v):
        lines.append(f"{z.real:.17g},{z.imag:.17g},{a:.17g},{b:.17g}")
    _write("\n".join(lines) + "\n", args.out)
    return 0


COMMANDS = {"run": cmd_run, "roots": cmd_roots, "tail-check": cmd_tail_check,
            "cover-check": cmd_cover_check, "potential-grid": cmd_potential_grid}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return COMMANDS[args.cmd](args)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except (harness.ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except RuntimeError as e:  # root finder gave up on this draw
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
