"""Command line entry point: ``calibrate``, ``simulate``, ``boundary``, ``estimate``."""

import argparse
import json
import logging
import math
import os
import sys

from . import simlab
from .empirical import STAT_KINDS, CriticalValueTable


def _alphas(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("need at least one alpha")
    return vals


def _size(text):
    # accepts 10000, 1e4 and 10**4
    try:
        if "**" in text:
            base, exp = text.split("**", 1)
            value = float(base) ** float(exp)
        else:
            value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a sample size: {text!r}")
    if value != math.floor(value) or value < 2:
        raise argparse.ArgumentTypeError(f"sample size must be an integer >= 2, got {text!r}")
    return int(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparsemix",
        description="Lower confidence bounds for the non-null fraction of a sparse normal mixture.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="simulate a sup-statistic and store its quantile table")
    p.add_argument("--n", type=_size, required=True)
    p.add_argument("--stat", choices=STAT_KINDS, required=True)
    p.add_argument("--reps", type=int, default=5000)
    p.add_argument("--alphas", type=_alphas, default=list(simlab.TABLE2_ALPHAS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--c0", type=float, default=3.0, help="window constant of wn_plus_plus")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("simulate", help="run a replication study from a key=value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output directory (default: next to the config)")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--table-dir", default=None)
    p.add_argument("--calibrate-missing", action="store_true", default=None)

    p = sub.add_parser("boundary", help="median eps_hat/eps over a (beta, r) grid")
    p.add_argument("--beta", type=simlab.parse_range, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--r", type=simlab.parse_range, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--n", type=_size, required=True)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--table", default=None,
                   help="wn_plus table at n; simulated with --cal-reps when omitted")
    p.add_argument("--cal-reps", type=int, default=1000)
    p.add_argument("--pairing", choices=("adjacent", "all"), default="adjacent")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("estimate", help="lower confidence bound from a file of z-scores")
    p.add_argument("--input", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--table", required=True)
    p.add_argument("--estimator", choices=simlab.ESTIMATORS, default="cjl")
    p.add_argument("--pairing", choices=("adjacent", "all"), default="adjacent")
    p.add_argument("--json", default=None, help="also write the report as JSON here")
    return parser


def _cmd_calibrate(args):
    table = simlab.run_calibration(args.n, args.stat, args.reps, args.alphas, seed=args.seed,
                                   out=args.out, c0=args.c0, workers=args.workers)
    norm = math.sqrt(2.0 * math.log(math.log(args.n)))
    print(f"{args.stat} n={args.n} reps={args.reps} seed={args.seed} -> {args.out}")
    for alpha, a in table.entries.items():
        print(f"  alpha={simlab.format_float(alpha):>8}  a={simlab.format_float(a):>16}  "
              f"a/sqrt(2 log log n)={simlab.format_float(a / norm)}")


def _cmd_simulate(args):
    overrides = {"workers": args.workers, "reps": args.reps, "seed": args.seed,
                 "table_dir": args.table_dir, "calibrate_missing": args.calibrate_missing}
    config = simlab.load_config(args.config, **overrides)
    out = args.out or os.path.splitext(args.config)[0] + "_out"
    report = simlab.run_replication_study(config, out_dir=out)
    print(f"config hash {config.config_hash()}, {config.reps} cycles -> {out}")
    for row in report.rows:
        print(f"  {row.estimator:8s} alpha={simlab.format_float(row.alpha):>6}  "
              f"a={simlab.format_float(row.a):>14}  overest={simlab.format_float(row.overest_freq)}"
              f"  mean={simlab.format_float(row.mean)}  median={simlab.format_float(row.median)}")


def _cmd_boundary(args):
    if args.table is not None:
        table = CriticalValueTable.load(args.table, n=args.n, statistic="wn_plus")
        note = os.path.basename(args.table)
    else:
        table = simlab.run_calibration(args.n, "wn_plus", args.cal_reps, [args.alpha],
                                       seed=args.seed, workers=args.workers)
        note = f"wn_plus simulated, reps={args.cal_reps}"
    a = table.value(args.alpha)
    rows = simlab.run_boundary_map(args.beta, args.r, args.n, args.reps, a, seed=args.seed,
                                   out=args.out, workers=args.workers, pairing=args.pairing,
                                   table_note=note)
    print(f"{len(rows)} cells, a={simlab.format_float(a)} -> {args.out}")


def _cmd_estimate(args):
    report = simlab.estimate_from_file(args.input, args.alpha, args.table, args.estimator,
                                       pairing=args.pairing)
    print(report.to_text())
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")


COMMANDS = {
    "calibrate": _cmd_calibrate,
    "simulate": _cmd_simulate,
    "boundary": _cmd_boundary,
    "estimate": _cmd_estimate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
