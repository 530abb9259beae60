"""Normalized RMSE and statistics over repeated runs."""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Metric:
    nrmse: float
    n_points: int


@dataclass(frozen=True)
class RepStats:
    mean: float
    std: float
    min: float
    max: float
    n_reps: int


def nrmse(pred, target, sigma2) -> Metric:
    """``sqrt(sum((pred - target)^2) / (N * sigma2))``."""
    pred = np.asarray(pred, dtype=np.float64).ravel()
    target = np.asarray(target, dtype=np.float64).ravel()
    if pred.shape != target.shape:
        raise ValueError(f"length mismatch: {pred.shape[0]} predictions, {target.shape[0]} targets")
    if pred.shape[0] == 0:
        raise ValueError("nrmse of an empty sequence")
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    sq = float(np.sum((pred - target) ** 2))
    return Metric(nrmse=math.sqrt(sq / (pred.shape[0] * sigma2)), n_points=pred.shape[0])


def aggregate(reps) -> RepStats:
    vals = sorted(float(r.nrmse if isinstance(r, Metric) else r) for r in reps)
    if not vals:
        raise ValueError("aggregate of no repetitions")
    arr = np.array(vals)
    # fsum/len can round one ulp past the extremes when all values agree
    mean = min(max(math.fsum(vals) / len(vals), vals[0]), vals[-1])
    std = float(np.std(arr, ddof=1)) if len(vals) > 1 else 0.0
    return RepStats(mean=mean, std=std, min=vals[0], max=vals[-1], n_reps=len(vals))
