"""Command line entry point: ``esnprune {generate,run,plot,centrality}``.

Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.
"""

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .centrality import MEASURES, centrality
from .config import OUTPUT_DIR_ENV, ConfigError, load_config
from .data import DataError, MackeyGlassParams, load_csv, mackey_glass, synth_load, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("esnprune")


def _output_dir(arg):
    return Path(os.environ.get(OUTPUT_DIR_ENV) or arg)


def cmd_generate(args):
    if args.kind == "mackey-glass":
        ds = mackey_glass(MackeyGlassParams(alpha=args.alpha, n_samples=args.n_samples))
    elif args.kind == "synth-load":
        ds = synth_load(args.n_samples, seed=args.seed, daily_period=args.daily_period,
                        weekly_period=args.weekly_period, noise_std=args.noise_std)
    else:
        if not args.path:
            raise ConfigError("--path is required for csv")
        ds = load_csv(args.path, args.column, has_header=not args.no_header)
    name = args.name or ds.name
    path = write_csv(ds, _output_dir(args.output_dir) / f"{name}.csv")
    v = ds.values
    sp = ds.splits
    print(f"wrote {path}")
    print(f"length={len(v)} min={v.min():.6g} max={v.max():.6g} mean={v.mean():.6g}")
    print(f"splits: washout={len(sp.washout)} train={len(sp.train)} "
          f"validation={len(sp.validation)} test={len(sp.test)}")
    return EXIT_OK


def cmd_run(args):
    from .experiment import format_table, run_experiment

    cfg = load_config(args.config, args.set)
    outcome = run_experiment(cfg)
    print(format_table(outcome.rows))
    print(f"results in {outcome.out_dir}")
    if outcome.n_failed:
        log.error("%d replica sweep(s) failed", outcome.n_failed)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_plot(args):
    from .plot import plot_curve_files

    out = plot_curve_files(args.curves, args.output)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_centrality(args):
    from .reservoir import load_reservoir

    rw, _ = load_reservoir(args.reservoir)
    scores = centrality(rw.w, args.measure)
    if args.output:
        scores.to_csv(args.output)
        print(f"wrote {args.output}")
    else:
        print("node_id,measure,score")
        for i, s in enumerate(scores.scores):
            print(f"{i},{scores.measure},{float(s)!r}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="esnprune", description="Centrality-based ESN reservoir pruning")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a dataset to CSV")
    g.add_argument("--kind", choices=["mackey-glass", "synth-load", "csv"], default="mackey-glass")
    g.add_argument("--n-samples", type=int, default=10000)
    g.add_argument("--alpha", type=float, default=17.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--daily-period", type=int, default=24)
    g.add_argument("--weekly-period", type=int, default=168)
    g.add_argument("--noise-std", type=float, default=0.1)
    g.add_argument("--path", help="input CSV (kind=csv)")
    g.add_argument("--column", default="0", help="column name or index (kind=csv)")
    g.add_argument("--no-header", action="store_true")
    g.add_argument("--name", help="output file stem")
    g.add_argument("--output-dir", default="data")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run prune sweeps from a config file")
    r.add_argument("config", nargs="?", help="YAML/JSON config (defaults apply if omitted)")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry, e.g. --set pruning.step=1")
    r.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="render curve CSVs to an SVG")
    p.add_argument("curves", nargs="+")
    p.add_argument("-o", "--output", default="pruning_curves.svg")
    p.set_defaults(func=cmd_plot)

    c = sub.add_parser("centrality", help="dump node scores of a saved reservoir")
    c.add_argument("reservoir", help="reservoir or trained-model JSON")
    c.add_argument("--measure", default="C2", help=f"one of {', '.join(MEASURES)}")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_centrality)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    from .plot import PlotError

    try:
        return args.func(args)
    except (ConfigError, DataError, PlotError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - top-level reporter
        log.exception("runtime failure")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
