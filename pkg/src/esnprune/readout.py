"""State harvesting, ridge readout training and prediction.

The readout sees rows ``[1, u(n+1), x(n+1)]`` (plus ``y(n)`` when the
reservoir has feedback weights) and is linear, so training is a single
ridge solve.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .linalg import as_matrix, ridge_solve
from .reservoir import HyperParams, ReservoirWeights, random_streams


def _as_sequence(seq, name):
    a = np.asarray(seq, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"{name} must be a sequence of vectors")
    if a.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(a)


@dataclass(frozen=True)
class StateHarvest:
    design: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if self.design.shape[0] != self.targets.shape[0]:
            raise ValueError("design and targets row counts differ")


@dataclass(frozen=True)
class TrainedEsn:
    reservoir: ReservoirWeights
    w_out: np.ndarray
    hp: HyperParams

    def __post_init__(self):
        w_out = as_matrix(self.w_out, "w_out")
        rw = self.reservoir
        n_fb = rw.w_back.shape[1] if rw.has_feedback else 0
        expected = 1 + rw.input_dim + rw.n + n_fb
        if w_out.shape[1] != expected:
            raise ValueError(f"w_out has {w_out.shape[1]} columns, expected {expected}")
        if n_fb and n_fb != w_out.shape[0]:
            raise ValueError("feedback width does not match output dimension")
        w_out = w_out.copy()
        w_out.setflags(write=False)
        object.__setattr__(self, "w_out", w_out)

    @property
    def output_dim(self):
        return self.w_out.shape[0]

    def to_dict(self):
        return {"hyperparams": self.hp.to_dict(), **self.reservoir.to_dict(), "w_out": self.w_out.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(
            reservoir=ReservoirWeights.from_dict(d),
            w_out=np.array(d["w_out"], dtype=np.float64),
            hp=HyperParams.from_dict(d["hyperparams"]),
        )


def collect_states(rw: ReservoirWeights, inputs, feedback=None):
    """Teacher-forced states from ``x(0) = 0``; row t follows ``inputs[t]``."""
    inputs = _as_sequence(inputs, "inputs")
    if inputs.shape[1] != rw.input_dim:
        raise ValueError(f"inputs have width {inputs.shape[1]}, reservoir expects {rw.input_dim}")
    x0 = np.zeros(rw.n)
    if rw.has_feedback:
        if feedback is None:
            raise ValueError("reservoir has feedback weights; feedback sequence required")
        feedback = _as_sequence(feedback, "feedback")
        if feedback.shape != (inputs.shape[0], rw.w_back.shape[1]):
            raise ValueError("feedback sequence shape does not match inputs / w_back")
        return kernels.run_reservoir_feedback(rw.w, rw.w_in, rw.w_back, inputs, feedback, x0)
    return kernels.run_reservoir(rw.w, rw.w_in, inputs, x0)


def design_rows(inputs, states, feedback=None):
    cols = [np.ones((states.shape[0], 1)), inputs, states]
    if feedback is not None:
        cols.append(feedback)
    return np.hstack(cols)


def shifted_targets(targets):
    """Teacher-forced feedback: ``y(n)`` seen while consuming ``u(n+1)``."""
    fb = np.zeros_like(targets)
    fb[1:] = targets[:-1]
    return fb


def noisy_inputs(inputs, noise_std, seed):
    """Inputs plus Gaussian noise from the seed's dedicated noise stream."""
    if noise_std == 0.0:
        return inputs
    rng = random_streams(seed)[3]
    return inputs + noise_std * rng.standard_normal(inputs.shape)


def harvest(rw: ReservoirWeights, inputs, targets, washout, feedback=None,
            noise_std=0.0, seed=0) -> StateHarvest:
    """Teacher-forced design rows ``[1, u(n+1), x(n+1)]`` after ``washout``.

    With ``noise_std > 0`` the inputs are jittered before driving the
    reservoir (targets stay clean), which makes the closed-loop readout
    tolerate its own prediction errors.
    """
    inputs = noisy_inputs(_as_sequence(inputs, "inputs"), noise_std, seed)
    targets = _as_sequence(targets, "targets")
    if inputs.shape[0] != targets.shape[0]:
        raise ValueError("inputs and targets must have the same length")
    if washout < 0 or washout >= inputs.shape[0]:
        raise ValueError(f"washout {washout} leaves no rows out of {inputs.shape[0]}")
    if rw.has_feedback and feedback is None:
        feedback = shifted_targets(targets)
    elif not rw.has_feedback:
        feedback = None
    states = collect_states(rw, inputs, feedback)
    fb = None if feedback is None else _as_sequence(feedback, "feedback")[washout:]
    design = design_rows(inputs[washout:], states[washout:], fb)
    return StateHarvest(design=design, targets=targets[washout:])


def train_readout(h: StateHarvest, lam):
    """``W_out`` of shape (output_dim, design columns)."""
    return ridge_solve(h.design, h.targets, lam).T


def fit(rw: ReservoirWeights, inputs, targets, hp: HyperParams, washout=None) -> TrainedEsn:
    inputs = _as_sequence(inputs, "inputs")
    if washout is None:
        washout = int(round(hp.washout_fraction * inputs.shape[0]))
    h = harvest(rw, inputs, targets, washout, noise_std=hp.train_noise, seed=hp.seed)
    return TrainedEsn(reservoir=rw, w_out=train_readout(h, hp.ridge_lambda), hp=hp)


def _generative_feedback(model, inputs):
    # in generative use y(n) == u(n+1), so the fed-back output is the input
    if not model.reservoir.has_feedback:
        return None
    if model.output_dim != inputs.shape[1]:
        raise ValueError("feedback reservoir needs output_dim == input_dim")
    return inputs


def _apply_readout(design, w_out):
    # row-by-row reduction: a row's output does not depend on how many
    # rows are evaluated together (a matrix product may round differently)
    return (design[:, None, :] * w_out[None, :, :]).sum(axis=2)


def predict_teacher_forced(model: TrainedEsn, inputs, feedback=None):
    """One-step outputs ``W_out [1, u(n+1), x(n+1)]`` under true inputs."""
    inputs = _as_sequence(inputs, "inputs")
    if feedback is None:
        feedback = _generative_feedback(model, inputs)
    states = collect_states(model.reservoir, inputs, feedback)
    fb = None if feedback is None else _as_sequence(feedback, "feedback")
    return _apply_readout(design_rows(inputs, states, fb), model.w_out)


def free_run_from(model: TrainedEsn, inputs, states, origins, horizon):
    """Generative rollouts started at several teacher-forced positions.

    ``states`` are the teacher-forced states for ``inputs``.  A rollout
    started at origin ``o`` first predicts the value after ``inputs[o]``.
    Returns an array (horizon, len(origins), output_dim).
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if model.output_dim != inputs.shape[1]:
        raise ValueError(
            f"free-run feeds outputs back as inputs: output_dim {model.output_dim} "
            f"!= input_dim {inputs.shape[1]}"
        )
    origins = np.asarray(origins, dtype=np.int64)
    fb = inputs[origins] if model.reservoir.has_feedback else None
    y0 = _apply_readout(design_rows(inputs[origins], states[origins], fb), model.w_out)
    rw = model.reservoir
    return kernels.free_run_batch(
        rw.w, rw.w_in, rw.back_matrix(), np.ascontiguousarray(model.w_out),
        np.ascontiguousarray(states[origins]), np.ascontiguousarray(y0), int(horizon),
    )


def predict_free_run(model: TrainedEsn, warmup_inputs, horizon):
    """Teacher-force through ``warmup_inputs`` then run ``horizon`` steps freely."""
    inputs = _as_sequence(warmup_inputs, "warmup_inputs")
    if model.output_dim != inputs.shape[1]:
        raise ValueError(
            f"generative mode needs output_dim == input_dim, got {model.output_dim} and {inputs.shape[1]}"
        )
    states = collect_states(model.reservoir, inputs, _generative_feedback(model, inputs))
    preds = free_run_from(model, inputs, states, [inputs.shape[0] - 1], horizon)
    return preds[:, 0, :]


def save_model(path, model: TrainedEsn):
    path = Path(path)
    path.write_text(json.dumps(model.to_dict()))
    return path


def load_model(path) -> TrainedEsn:
    return TrainedEsn.from_dict(json.loads(Path(path).read_text()))
