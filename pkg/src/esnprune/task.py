"""One-dimensional forecasting task built from a split series.

Inputs are ``u(n) = v[n]`` and targets ``y(n) = v[n + 1]``.  Teacher-forced
states are computed once per reservoir over the whole series; the readout
is trained on rows whose targets fall in the train range, and the
validation/test scores come from generative rollouts of ``horizon`` steps
whose scored targets lie entirely inside the respective split.
"""

from dataclasses import dataclass

import numpy as np

from .data import SeriesDataset
from .evaluation import nrmse
from .readout import (
    StateHarvest, TrainedEsn, collect_states, design_rows, free_run_from, noisy_inputs, train_readout,
)
from .reservoir import HyperParams, ReservoirWeights

SCORE_MODES = ("final", "trajectory")


class NonFiniteForecastError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Score:
    val_nrmse: float
    test_nrmse: float
    train_nrmse: float


class ForecastTask:
    def __init__(self, ds: SeriesDataset, horizon=84, stride=10, mode="final"):
        if horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {horizon}")
        if stride < 1:
            raise ValueError(f"stride must be >= 1, got {stride}")
        if mode not in SCORE_MODES:
            raise ValueError(f"mode must be one of {SCORE_MODES}, got {mode!r}")
        self.ds = ds
        self.horizon = int(horizon)
        self.stride = int(stride)
        self.mode = mode

        v = ds.values
        self.inputs = np.ascontiguousarray(v[:-1, None])
        self.targets = np.ascontiguousarray(v[1:, None])
        sp = ds.splits
        # row t predicts v[t + 1]
        self.train_rows = np.arange(max(sp.washout.stop - 1, 0), sp.train.stop - 1)
        if self.train_rows.size == 0:
            raise ValueError("no training rows after washout")
        self.val_origins = self._origins(sp.validation)
        self.test_origins = self._origins(sp.test)
        self.val_sigma2 = self._variance(sp.validation)
        self.test_sigma2 = self._variance(sp.test)

    def _origins(self, split):
        h = self.horizon
        if self.mode == "final":
            lo, hi = split.start - h, split.stop - h
        else:
            lo, hi = split.start - 1, split.stop - h
        lo = max(lo, 0)
        if hi <= lo:
            raise ValueError(
                f"split [{split.start}, {split.stop}) is too short for horizon {h} in {self.mode!r} mode"
            )
        return np.arange(lo, hi, self.stride)

    def _variance(self, split):
        var = float(np.var(self.ds.values[split.start:split.stop]))
        if var <= 0:
            raise ValueError("evaluation split has zero variance")
        return var

    def fit(self, rw: ReservoirWeights, hp: HyperParams):
        """Train a readout; returns ``(model, clean_teacher_forced_states)``."""
        clean = collect_states(rw, self.inputs, self.inputs if rw.has_feedback else None)
        if hp.train_noise > 0:
            drive = noisy_inputs(self.inputs, hp.train_noise, hp.seed)
            states = collect_states(rw, drive, drive if rw.has_feedback else None)
        else:
            drive, states = self.inputs, clean
        rows = self.train_rows
        fb = drive[rows] if rw.has_feedback else None
        design = design_rows(drive[rows], states[rows], fb)
        w_out = train_readout(StateHarvest(design, self.targets[rows]), hp.ridge_lambda)
        return TrainedEsn(reservoir=rw, w_out=w_out, hp=hp), clean

    def _score_split(self, model, states, origins, sigma2):
        preds = free_run_from(model, self.inputs, states, origins, self.horizon)[:, :, 0]
        if not np.all(np.isfinite(preds)):
            raise NonFiniteForecastError("free-run forecast diverged to non-finite values")
        v = self.ds.values
        if self.mode == "final":
            return nrmse(preds[-1], v[origins + self.horizon], sigma2).nrmse
        idx = origins[None, :] + np.arange(1, self.horizon + 1)[:, None]
        return nrmse(preds, v[idx], sigma2).nrmse

    def score(self, rw: ReservoirWeights, hp: HyperParams) -> Score:
        model, states = self.fit(rw, hp)
        rows = self.train_rows
        fb = self.inputs[rows] if rw.has_feedback else None
        one_step = design_rows(self.inputs[rows], states[rows], fb) @ model.w_out.T
        train_sigma2 = float(np.var(self.targets[rows]))
        return Score(
            val_nrmse=self._score_split(model, states, self.val_origins, self.val_sigma2),
            test_nrmse=self._score_split(model, states, self.test_origins, self.test_sigma2),
            train_nrmse=nrmse(one_step, self.targets[rows], train_sigma2).nrmse,
        )
