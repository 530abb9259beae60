"""Seeded prune-sweep experiments and their result files."""

import csv
import json
import logging
import math
import platform
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._jit import USE_NUMBA
from .config import ExperimentConfig
from .data import (MackeyGlassParams, load_csv, mackey_glass, make_remainder_splits, make_splits,
                   normalize, synth_load)
from .evaluation import aggregate
from .linalg import IllConditionedError
from .pruning import PruneCurve, PruneError, prune_sweep
from .reservoir import DegenerateReservoirError, generate_reservoir, save_reservoir
from .task import ForecastTask

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "dataset", "n_initial", "measure", "n_reps", "n_failed",
    "initial_nrmse", "initial_nrmse_std",
    "optimal_n", "optimal_nrmse", "optimal_nrmse_std",
    "reduced_error", "reduced_error_pct", "smallest_n",
]


def build_dataset(spec):
    split_fn = make_remainder_splits if spec.split_mode == "remainder" else make_splits
    if spec.kind == "mackey-glass":
        p = MackeyGlassParams(alpha=spec.alpha, dt=spec.dt, subsample=spec.subsample,
                              n_samples=spec.n_samples, initial_value=spec.initial_value)
        ds = mackey_glass(p, splits=split_fn(spec.n_samples, *spec.fractions))
    elif spec.kind == "synth-load":
        ds = synth_load(spec.n_samples, seed=spec.seed, daily_period=spec.daily_period,
                        weekly_period=spec.weekly_period, noise_std=spec.noise_std, trend=spec.trend,
                        splits=split_fn(spec.n_samples, *spec.fractions))
    else:
        ds = load_csv(spec.path, spec.column, spec.has_header)
        ds = ds.with_splits(split_fn(len(ds), *spec.fractions))
    return normalize(ds) if spec.should_normalize else ds


def build_task(cfg: ExperimentConfig):
    return ForecastTask(build_dataset(cfg.dataset), horizon=cfg.horizon,
                        stride=cfg.eval_stride, mode=cfg.score_mode)


@dataclass
class ReplicaResult:
    size: int
    seed: int
    curves: dict = field(default_factory=dict)  # measure -> PruneCurve
    errors: dict = field(default_factory=dict)  # measure -> message


_worker_task = None


def _init_worker(cfg):
    global _worker_task
    _worker_task = build_task(cfg)


def run_replica(cfg: ExperimentConfig, size, seed, task=None, reservoir_dir=None) -> ReplicaResult:
    """All measures for one (size, seed): shared reservoir and baseline."""
    task = task or _worker_task
    result = ReplicaResult(size=size, seed=seed)
    hp = cfg.hp_template(n_reservoir=size, seed=seed)
    try:
        rw = generate_reservoir(hp)
        baseline = task.score(rw, hp)
    except (DegenerateReservoirError, IllConditionedError, ArithmeticError, ValueError) as exc:
        for m in cfg.measures:
            result.errors[m] = f"baseline failed: {type(exc).__name__}: {exc}"
        return result
    if reservoir_dir is not None:
        save_reservoir(Path(reservoir_dir) / f"reservoir_{size}_{seed}.json", rw, hp)
    for m in cfg.measures:
        try:
            result.curves[m] = prune_sweep(rw, task, cfg.prune_config(m), hp, baseline=baseline)
        except PruneError as exc:
            result.errors[m] = str(exc)
    return result


def _replica_job(args):
    cfg, size, seed = args
    return run_replica(cfg, size, seed)


def curve_filename(size, measure, seed):
    return f"curve_{size}_{measure}_{seed}.csv"


def summarize(cfg: ExperimentConfig, dataset_name, results):
    rows = []
    for size in cfg.reservoir_sizes:
        for m in cfg.measures:
            curves = [r.curves[m] for r in results if r.size == size and m in r.curves]
            n_failed = sum(1 for r in results if r.size == size and m in r.errors)
            row = {"dataset": dataset_name, "n_initial": size, "measure": m,
                   "n_reps": len(curves), "n_failed": n_failed}
            if curves:
                base = aggregate([c.baseline_test_nrmse for c in curves])
                opt = aggregate([c.optimal_test_nrmse for c in curves])
                reduced = base.mean - opt.mean
                row.update(
                    initial_nrmse=base.mean, initial_nrmse_std=base.std,
                    optimal_n=float(np.mean([c.optimal_n for c in curves])),
                    optimal_nrmse=opt.mean, optimal_nrmse_std=opt.std,
                    reduced_error=reduced, reduced_error_pct=100.0 * reduced / base.mean,
                    smallest_n=float(np.mean([c.smallest_n for c in curves])),
                )
            rows.append(row)
    return rows


def _fmt(v):
    if isinstance(v, float):
        return "nan" if not math.isfinite(v) else f"{v:.6f}"
    return str(v)


def write_summary(rows, out_dir):
    out_dir = Path(out_dir)
    with (out_dir / "summary.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        for r in rows:
            writer.writerow([_fmt(r.get(c, math.nan)) for c in SUMMARY_COLUMNS])
    (out_dir / "summary.json").write_text(json.dumps({"rows": rows}, indent=2, allow_nan=True) + "\n")


def format_table(rows):
    """Plain-text table in the layout: Initial N (NRMSE) | Optimal N (NRMSE) | Reduced | Smallest N."""
    header = ["Measure", "Initial N (NRMSE)", "Optimal N (NRMSE)", "Reduced Error (%)", "Smallest N"]
    lines = []
    for r in rows:
        if "initial_nrmse" not in r:
            lines.append([r["measure"], f"N={r['n_initial']} (failed)", "--", "--", "--"])
            continue
        reduced = "--" if r["reduced_error"] <= 0 else f"{r['reduced_error']:.6f} ({r['reduced_error_pct']:.1f}%)"
        lines.append([
            r["measure"],
            f"N={r['n_initial']} ({r['initial_nrmse']:.6f})",
            f"N={r['optimal_n']:.1f} ({r['optimal_nrmse']:.6f})",
            reduced,
            f"N={r['smallest_n']:.1f}",
        ])
    widths = [max(len(str(x)) for x in col) for col in zip(header, *lines)]
    out = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    out.append("  ".join("-" * w for w in widths))
    out += ["  ".join(str(c).ljust(w) for c, w in zip(line, widths)) for line in lines]
    return "\n".join(out)


@dataclass
class RunOutcome:
    rows: list
    n_failed: int
    out_dir: Path
    curve_paths: list


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> RunOutcome:
    out_dir = Path(out_dir or cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    task = build_task(cfg)
    jobs = [(size, seed) for size in cfg.reservoir_sizes for seed in cfg.seeds()]
    reservoir_dir = None
    if cfg.save_reservoirs:
        reservoir_dir = out_dir / "reservoirs"
        reservoir_dir.mkdir(exist_ok=True)

    if cfg.workers > 1 and reservoir_dir is None:
        with ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker,
                                 initargs=(cfg,)) as pool:
            results = list(pool.map(_replica_job, [(cfg, s, k) for s, k in jobs]))
    else:
        results = []
        for size, seed in jobs:
            log.info("replica size=%d seed=%d", size, seed)
            results.append(run_replica(cfg, size, seed, task=task, reservoir_dir=reservoir_dir))

    curve_paths = []
    n_failed = 0
    for r in results:
        for m in cfg.measures:
            if m in r.errors:
                n_failed += 1
                log.error("replica size=%d seed=%d measure=%s failed: %s", r.size, r.seed, m, r.errors[m])
                continue
            path = out_dir / curve_filename(r.size, m, r.seed)
            r.curves[m].to_csv(path)
            r.curves[m].to_json(path.with_suffix(".json"))
            curve_paths.append(path)

    rows = summarize(cfg, task.ds.name, results)
    write_summary(rows, out_dir)

    if cfg.plot and curve_paths:
        from .plot import plot_curve_files
        fig_dir = out_dir / "figures"
        fig_dir.mkdir(exist_ok=True)
        plot_curve_files(curve_paths, fig_dir / "pruning_curves.svg")

    manifest = {
        "config": cfg.to_dict(),
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba_enabled": USE_NUMBA,
        "started_unix": started,
        "wall_clock_seconds": time.time() - started,
        "n_replicas": len(jobs),
        "n_failed": n_failed,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n")
    return RunOutcome(rows=rows, n_failed=n_failed, out_dir=out_dir, curve_paths=curve_paths)
