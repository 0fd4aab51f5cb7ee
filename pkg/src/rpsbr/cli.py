"""Command-line interface: ``rpsbr {orbit,attractor,bifurcation,basins,verify}``.

Exit codes: 0 success, 1 verification failure, 2 bad input, 3 orbit on an
indifference set, 4 bifurcation boundary, 5 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .attractor import enumerate_attractor
from .core import DEFAULT_GAMMA_TOL, GameParams, Region, as_strategy, classify_region, indifferent_strategies, iterate_T
from .scan import (
    OUTSIDE,
    basin_raster,
    bifurcation_sweep,
    write_csv,
    write_ppm,
)
from .verify import run_verify, shift_thresholds

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_GAMMA = 3
EXIT_BOUNDARY = 4
EXIT_IO = 5

NAMES = ("Rock", "Paper", "Scissors")


class UsageError(Exception):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


def _add_game_args(p):
    p.add_argument("--a", type=float, help="win payoff")
    p.add_argument("--b", type=float, help="loss payoff")
    p.add_argument("--alpha", type=float, help="payoff ratio a/b (instead of --a/--b)")
    p.add_argument("--lambda", dest="lam", type=float, help="contraction factor in (0, 1)")
    p.add_argument("--epsilon", type=float, help="step size 1 - lambda (instead of --lambda)")
    p.add_argument("--gamma-tol", type=float, default=DEFAULT_GAMMA_TOL)


def game_from_args(args, need_lambda=True) -> GameParams:
    has_ab = args.a is not None or args.b is not None
    if has_ab and args.alpha is not None:
        raise UsageError("give either --a/--b or --alpha, not both")
    if has_ab and (args.a is None or args.b is None):
        raise UsageError("--a and --b must be given together")
    if not has_ab and args.alpha is None:
        raise UsageError("one of --alpha or --a/--b is required")
    if need_lambda:
        if (args.lam is None) == (args.epsilon is None):
            raise UsageError("exactly one of --lambda or --epsilon is required")
    lam = args.lam if args.lam is not None else 1.0 - args.epsilon
    a, b = (args.a, args.b) if has_ab else (args.alpha, 1.0)
    try:
        return GameParams(a=a, b=b, lam=lam, gamma_tol=args.gamma_tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def param_echo(g: GameParams) -> dict:
    return {"a": g.a, "b": g.b, "alpha": g.alpha, "lambda": g.lam, "epsilon": g.epsilon, "gamma_tol": g.gamma_tol}


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def cmd_orbit(args) -> int:
    g = game_from_args(args)
    try:
        x0 = as_strategy([float(v) for v in args.x0.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad --x0: {exc}") from exc
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    if classify_region(g, x0) is Region.GAMMA:
        tied = "".join(str(i + 1) for i in indifferent_strategies(g, x0))
        print(f"error: start point {x0.tolist()} lies on the indifference set Gamma_{tied} "
              f"({', '.join(NAMES[int(i) - 1] for i in tied)} tie)", file=sys.stderr)
        return EXIT_GAMMA
    traj = iterate_T(g, x0, args.steps)
    out, close = _open_out(args.out)
    try:
        if args.format == "json":
            json.dump({
                "params": param_echo(g),
                "points": [[float(v) for v in p] for p in traj.points],
                "regions": [lab.name for lab in traj.labels],
                "hit_gamma": traj.hit_gamma,
            }, out, indent=2)
            out.write("\n")
        else:
            print(f"# alpha={fmt(g.alpha)} lambda={fmt(g.lam)} a={fmt(g.a)} b={fmt(g.b)}", file=out)
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["n", "x1", "x2", "x3", "region"])
            for n, (p, lab) in enumerate(zip(traj.points, traj.labels)):
                writer.writerow([n, fmt(p[0]), fmt(p[1]), fmt(p[2]), lab.name])
    finally:
        if close:
            out.close()
    if traj.hit_gamma:
        print(f"error: orbit reached an indifference set at step {len(traj) - 1}", file=sys.stderr)
        return EXIT_GAMMA
    return EXIT_OK


def attractor_payload(g, report) -> dict:
    payload = {
        "params": param_echo(g),
        "head": report.head,
        "tail": report.tail,
        "count": report.count,
        "boundary": report.boundary,
        "nash": [float(v) for v in report.nash],
        "orbits": [
            {
                "k": orb.k,
                "period": orb.period,
                "w": [float(v) for v in orb.points[0]],
                "points": [[float(v) for v in p] for p in orb.points],
            }
            for orb in report.orbits
        ],
    }
    if report.shapley is not None:
        payload["shapley"] = [[float(v) for v in vert] for vert in report.shapley]
    return payload


def cmd_attractor(args) -> int:
    g = game_from_args(args)
    report = enumerate_attractor(g, allow_boundary=True)
    out, close = _open_out(args.out)
    try:
        if args.format == "text":
            print(f"alpha={fmt(g.alpha)} lambda={fmt(g.lam)}", file=out)
            print(f"head={report.head} tail={report.tail} count={report.count}"
                  + (" (bifurcation boundary)" if report.boundary else ""), file=out)
            for orb in report.orbits:
                w = orb.points[0]
                print(f"k={orb.k} period={orb.period} w=({fmt(w[0])}, {fmt(w[1])}, {fmt(w[2])})", file=out)
        else:
            # repr of a Python float round-trips, i.e. 17 significant digits suffice
            json.dump(attractor_payload(g, report), out, indent=2)
            out.write("\n")
    finally:
        if close:
            out.close()
    return EXIT_BOUNDARY if report.boundary else EXIT_OK


def cmd_bifurcation(args) -> int:
    if args.alpha is None and (args.a is None or args.b is None):
        raise UsageError("one of --alpha or --a/--b is required")
    if args.alpha is not None and (args.a is not None or args.b is not None):
        raise UsageError("give either --a/--b or --alpha, not both")
    alpha = args.alpha if args.alpha is not None else args.a / args.b
    lo, hi, n = args.lambda_min, args.lambda_max, args.points
    if n < 1:
        raise UsageError("--points must be positive")
    if not (0.0 < lo < 1.0 and 0.0 < hi < 1.0) or lo > hi or (lo == hi and n > 1):
        raise UsageError(f"need 0 < lambda-min < lambda-max < 1, got {lo}, {hi}")
    if alpha <= 0:
        raise UsageError("alpha must be positive")
    grid = [lo] if n == 1 else np.linspace(lo, hi, n).tolist()
    scan = bifurcation_sweep(alpha, grid)
    if args.out in (None, "-"):
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["alpha", "lambda", "head", "tail", "count", "boundary"])
        for lam, h, t, c, f in zip(scan.lambdas, scan.heads, scan.tails, scan.counts, scan.boundary_flags):
            writer.writerow([fmt(alpha), fmt(lam), h, t, c, int(f)])
    else:
        write_csv(scan, args.out)
    return EXIT_OK


def cmd_basins(args) -> int:
    g = game_from_args(args)
    if args.resolution < 1:
        raise UsageError("--resolution must be positive")
    report = enumerate_attractor(g, allow_boundary=True)
    raster = basin_raster(g, args.resolution, args.iters, args.tol, report=report, n_jobs=args.jobs)
    prefix = args.out or "basins"
    write_ppm(raster, prefix + ".ppm")
    write_csv(raster, prefix + ".csv")
    shares = raster.shares()
    inside = raster.labels[raster.labels != OUTSIDE]
    print(f"alpha={fmt(g.alpha)} lambda={fmt(g.lam)} resolution={args.resolution} "
          f"iters={args.iters} tol={fmt(args.tol)} cells={inside.size} "
          f"orbits={len(shares)} unresolved={fmt(raster.unresolved_fraction())}")
    for k, share in shares.items():
        print(f"period {3 * k}: {fmt(share)}")
    return EXIT_BOUNDARY if report.boundary else EXIT_OK


def cmd_verify(args) -> int:
    mutate = shift_thresholds(args.inject_bk_offset) if args.inject_bk_offset else None
    report = run_verify(samples=args.samples, seed=args.seed, mutate=mutate)
    text = report.to_json()
    if args.out in (None, "-"):
        print(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if not report.passed:
        print("verification failed: " + ", ".join(report.failed_names()), file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rpsbr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbit", help="iterate the map from a starting strategy")
    _add_game_args(p)
    p.add_argument("--x0", required=True, help="comma separated start, e.g. 0.8,0.2,0")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("attractor", help="enumerate the periodic attractor")
    _add_game_args(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=cmd_attractor)

    p = sub.add_parser("bifurcation", help="sweep the orbit count over lambda")
    _add_game_args(p)
    p.add_argument("--lambda-min", type=float, required=True)
    p.add_argument("--lambda-max", type=float, required=True)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_bifurcation)

    p = sub.add_parser("basins", help="rasterize basins of attraction to PPM + CSV")
    _add_game_args(p)
    p.add_argument("--resolution", type=int, default=300)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output prefix (writes PREFIX.ppm and PREFIX.csv)")
    p.add_argument("--format", choices=["ppm"], default="ppm")
    p.set_defaults(func=cmd_basins)

    p = sub.add_parser("verify", help="run the randomized invariant suite")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--inject-bk-offset", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
