"""Centrality-guided node pruning with readout retraining.

A sweep starts from the full reservoir, repeatedly drops the ``step``
lowest-ranked nodes, retrains the readout on the smaller reservoir and
scores it.  The best size is picked on validation error; test error is
only reported.
"""

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional

import numpy as np

from .centrality import canonical_measure, centrality, rank_nodes
from .linalg import spectral_radius
from .reservoir import HyperParams, ReservoirWeights, scale_to_radius
from .task import ForecastTask

log = logging.getLogger(__name__)


class PruneError(RuntimeError):
    pass


@dataclass(frozen=True)
class PruneConfig:
    measure: str = "C2"
    step: Optional[int] = None  # None: 1% of the initial size, at least one node
    max_prune_fraction: float = 0.4
    recompute_each_step: bool = True
    esp_guard: bool = True
    rescale_each_step: bool = False
    by_magnitude: bool = False

    def __post_init__(self):
        object.__setattr__(self, "measure", canonical_measure(self.measure))
        if self.step is not None and self.step < 1:
            raise ValueError(f"step must be >= 1, got {self.step}")
        if not 0.0 <= self.max_prune_fraction < 1.0:
            raise ValueError(f"max_prune_fraction must be in [0, 1), got {self.max_prune_fraction}")

    def step_for(self, n):
        return self.step if self.step is not None else max(1, n // 100)


@dataclass
class PruneStep:
    n_remaining: int
    removed_ids: List[int]
    val_nrmse: float
    test_nrmse: float
    rho: float
    rescaled: bool = False
    error: Optional[str] = None

    @property
    def ok(self):
        return self.error is None


@dataclass
class PruneCurve:
    n_initial: int
    measure: str
    baseline_val_nrmse: float
    baseline_test_nrmse: float
    baseline_rho: float
    steps: List[PruneStep] = field(default_factory=list)
    optimal_n: int = 0
    optimal_val_nrmse: float = math.nan
    optimal_test_nrmse: float = math.nan
    smallest_n: int = 0

    def select(self):
        """Fill in optimal and smallest sizes from the recorded steps."""
        candidates = [(self.baseline_val_nrmse, -self.n_initial, self.baseline_test_nrmse)]
        candidates += [(s.val_nrmse, -s.n_remaining, s.test_nrmse) for s in self.steps if s.ok]
        val, neg_n, test = min(candidates)
        self.optimal_n, self.optimal_val_nrmse, self.optimal_test_nrmse = -neg_n, val, test
        within = [s.n_remaining for s in self.steps if s.ok and s.val_nrmse <= self.baseline_val_nrmse]
        self.smallest_n = min(within, default=self.n_initial)
        return self

    def pruned_counts(self):
        return [self.n_initial - s.n_remaining for s in self.steps]

    def summary(self):
        return {
            "measure": self.measure,
            "n_initial": self.n_initial,
            "baseline": {"val_nrmse": self.baseline_val_nrmse, "test_nrmse": self.baseline_test_nrmse},
            "optimal_n": self.optimal_n,
            "optimal_val_nrmse": self.optimal_val_nrmse,
            "optimal_test_nrmse": self.optimal_test_nrmse,
            "smallest_n": self.smallest_n,
            "n_failed_steps": sum(not s.ok for s in self.steps),
        }

    def to_csv(self, path):
        """Step table; row 0 is the unpruned baseline."""
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["step", "n_remaining", "removed_count", "val_nrmse", "test_nrmse",
                             "rho", "rescaled", "removed_ids", "error"])
            writer.writerow([0, self.n_initial, 0, _fmt(self.baseline_val_nrmse),
                             _fmt(self.baseline_test_nrmse), _fmt(self.baseline_rho), 0, "", ""])
            for k, s in enumerate(self.steps, start=1):
                writer.writerow([k, s.n_remaining, len(s.removed_ids), _fmt(s.val_nrmse),
                                 _fmt(s.test_nrmse), _fmt(s.rho), int(s.rescaled),
                                 " ".join(map(str, s.removed_ids)), s.error or ""])
        return path

    def to_json(self, path):
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2, default=_json_default) + "\n")
        return path


def _fmt(x):
    return "nan" if x is None or not math.isfinite(x) else f"{x:.10g}"


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(type(x))


def remove_nodes(rw: ReservoirWeights, ids) -> ReservoirWeights:
    """Delete nodes ``ids``: their rows/columns of W and rows of W_in, W_back."""
    ids = [int(i) for i in ids]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    if any(not 0 <= i < rw.n for i in ids):
        raise ValueError(f"node ids must lie in [0, {rw.n})")
    if len(ids) >= rw.n:
        raise ValueError("cannot remove every node")
    if not ids:
        return rw
    keep = np.setdiff1d(np.arange(rw.n), ids)
    return ReservoirWeights(
        w=rw.w[np.ix_(keep, keep)],
        w_in=rw.w_in[keep],
        w_back=None if rw.w_back is None else rw.w_back[keep],
    )


def prune_sweep(rw: ReservoirWeights, task: ForecastTask, cfg: PruneConfig,
                hp: HyperParams, baseline=None) -> PruneCurve:
    """Run one sweep.  ``baseline`` may carry a precomputed score of ``rw``."""
    n0 = rw.n
    step = cfg.step_for(n0)
    max_removed = int(math.floor(cfg.max_prune_fraction * n0 + 1e-9))

    base = baseline if baseline is not None else task.score(rw, hp)
    curve = PruneCurve(
        n_initial=n0, measure=cfg.measure,
        baseline_val_nrmse=base.val_nrmse, baseline_test_nrmse=base.test_nrmse,
        baseline_rho=spectral_radius(rw.w),
    )

    alive = list(range(n0))  # original id of each current node
    current = rw
    fixed_order = None
    if not cfg.recompute_each_step:
        fixed_order = rank_nodes(centrality(rw.w, cfg.measure), by_magnitude=cfg.by_magnitude)

    removed = 0
    while removed + step <= max_removed:
        if fixed_order is None:
            local = rank_nodes(centrality(current.w, cfg.measure), by_magnitude=cfg.by_magnitude)[:step]
        else:
            position = {orig: k for k, orig in enumerate(alive)}
            local = [position[o] for o in fixed_order if o in position][:step]
        original_ids = sorted(alive[i] for i in local)
        current = remove_nodes(current, local)
        gone = set(original_ids)
        alive = [o for o in alive if o not in gone]
        removed += len(local)

        rho = spectral_radius(current.w)
        rescaled = False
        if (cfg.esp_guard and rho >= 1.0) or (cfg.rescale_each_step and rho > 0.0):
            current = replace(current, w=scale_to_radius(current.w, hp.spectral_radius_target))
            rho = spectral_radius(current.w)
            rescaled = True

        try:
            sc = task.score(current, hp)
            curve.steps.append(PruneStep(current.n, original_ids, sc.val_nrmse, sc.test_nrmse, rho, rescaled))
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            log.warning("prune step at n=%d failed: %s", current.n, exc)
            curve.steps.append(PruneStep(current.n, original_ids, math.nan, math.nan, rho, rescaled,
                                         error=f"{type(exc).__name__}: {exc}"))

    if curve.steps and not any(s.ok for s in curve.steps):
        raise PruneError(f"every prune step failed (first error: {curve.steps[0].error})")
    return curve.select()
