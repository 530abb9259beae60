"""Random reservoir construction, spectral scaling and the state update."""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .linalg import as_matrix, as_vector, spectral_radius


class DegenerateReservoirError(ValueError):
    pass


@dataclass(frozen=True)
class HyperParams:
    """Reservoir and readout settings.

    Defaults were tuned on the validation split of the unit-sampled
    Mackey-Glass task at 200 nodes (84-step generative forecast).
    ``train_noise`` is the std of Gaussian jitter added to the teacher
    inputs while harvesting states; without it the closed-loop rollouts
    of a lightly regularized readout tend to diverge.
    """

    n_reservoir: int = 200
    input_dim: int = 1
    output_dim: int = 1
    connectivity: float = 0.05
    spectral_radius_target: float = 0.9
    input_scaling: float = 0.3
    ridge_lambda: float = 1e-10
    train_noise: float = 2e-4
    seed: int = 0
    feedback_enabled: bool = False
    washout_fraction: float = 0.1
    horizon: int = 84

    def __post_init__(self):
        if self.n_reservoir < 2:
            raise ValueError(f"n_reservoir must be >= 2, got {self.n_reservoir}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("input_dim and output_dim must be >= 1")
        if not 0.0 < self.connectivity <= 1.0:
            raise ValueError(f"connectivity must be in (0, 1], got {self.connectivity}")
        if not 0.0 < self.spectral_radius_target < 1.0:
            raise ValueError(
                f"spectral_radius_target must be in (0, 1), got {self.spectral_radius_target}"
            )
        if self.input_scaling <= 0:
            raise ValueError(f"input_scaling must be positive, got {self.input_scaling}")
        if self.ridge_lambda < 0:
            raise ValueError(f"ridge_lambda must be non-negative, got {self.ridge_lambda}")
        if self.train_noise < 0:
            raise ValueError(f"train_noise must be non-negative, got {self.train_noise}")
        if not 0.0 <= self.washout_fraction < 1.0:
            raise ValueError(f"washout_fraction must be in [0, 1), got {self.washout_fraction}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown hyperparameters: {sorted(unknown)}")
        return cls(**d)

    def replace(self, **changes):
        return type(self).from_dict({**self.to_dict(), **changes})


@dataclass(frozen=True)
class ReservoirWeights:
    w: np.ndarray
    w_in: np.ndarray
    w_back: Optional[np.ndarray] = None

    def __post_init__(self):
        w = as_matrix(self.w, "w")
        w_in = as_matrix(self.w_in, "w_in")
        if w.shape[0] != w.shape[1]:
            raise ValueError(f"w must be square, got {w.shape}")
        if w_in.shape[0] != w.shape[0]:
            raise ValueError(f"w_in has {w_in.shape[0]} rows, reservoir has {w.shape[0]} nodes")
        arrays = {"w": w, "w_in": w_in}
        if self.w_back is not None:
            w_back = as_matrix(self.w_back, "w_back")
            if w_back.shape[0] != w.shape[0]:
                raise ValueError("w_back row count does not match reservoir size")
            arrays["w_back"] = w_back
        for name, arr in arrays.items():
            arr = np.array(arr, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self):
        return self.w.shape[0]

    @property
    def input_dim(self):
        return self.w_in.shape[1]

    @property
    def has_feedback(self):
        return self.w_back is not None

    def back_matrix(self):
        """``w_back``, or an (n, 0) placeholder so kernels see one signature."""
        if self.w_back is None:
            return np.zeros((self.n, 0))
        return self.w_back

    def to_dict(self):
        d = {"w": self.w.tolist(), "w_in": self.w_in.tolist()}
        if self.w_back is not None:
            d["w_back"] = self.w_back.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        w_back = d.get("w_back")
        return cls(
            w=np.array(d["w"], dtype=np.float64),
            w_in=np.array(d["w_in"], dtype=np.float64),
            w_back=None if w_back is None else np.array(w_back, dtype=np.float64),
        )


def random_streams(seed):
    """Independent generators ``(w, w_in, w_back, train_noise)``.

    Child ``k`` of ``SeedSequence(seed)`` drives PCG64 stream ``k``, so a
    given seed yields the same weights on every platform and enabling
    feedback or noise never perturbs the other matrices.
    """
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(4)]


def generate_reservoir(hp: HyperParams) -> ReservoirWeights:
    """Sparse uniform[-0.5, 0.5] reservoir rescaled to ``hp.spectral_radius_target``."""
    rng_w, rng_in, rng_back, _ = random_streams(hp.seed)
    n = hp.n_reservoir

    values = rng_w.uniform(-0.5, 0.5, size=(n, n))
    mask = rng_w.random(size=(n, n)) < hp.connectivity
    w = np.where(mask, values, 0.0)
    if spectral_radius(w) == 0.0:
        raise DegenerateReservoirError(
            f"degenerate reservoir: n={n}, connectivity={hp.connectivity} gave zero spectral radius"
        )
    w = scale_to_radius(w, hp.spectral_radius_target)

    w_in = rng_in.uniform(-hp.input_scaling, hp.input_scaling, size=(n, hp.input_dim))
    w_back = None
    if hp.feedback_enabled:
        w_back = rng_back.uniform(-hp.input_scaling, hp.input_scaling, size=(n, hp.output_dim))
    return ReservoirWeights(w=w, w_in=w_in, w_back=w_back)


def scale_to_radius(w, rho):
    w = as_matrix(w, "w")
    if rho <= 0:
        raise ValueError(f"target radius must be positive, got {rho}")
    current = spectral_radius(w)
    if current == 0.0:
        raise DegenerateReservoirError("cannot rescale a matrix with zero spectral radius")
    return w * (rho / current)


def update_state(rw: ReservoirWeights, x, u, y_prev=None):
    """One step of ``x' = tanh(W x + W_in u [+ W_back y_prev])``."""
    x = as_vector(x, "x")
    u = as_vector(u, "u")
    if x.shape[0] != rw.n:
        raise ValueError(f"state has length {x.shape[0]}, reservoir has {rw.n} nodes")
    if u.shape[0] != rw.input_dim:
        raise ValueError(f"input has length {u.shape[0]}, expected {rw.input_dim}")
    pre = rw.w @ x + rw.w_in @ u
    if rw.has_feedback:
        if y_prev is None:
            raise ValueError("reservoir has feedback weights; y_prev is required")
        y_prev = as_vector(y_prev, "y_prev")
        if y_prev.shape[0] != rw.w_back.shape[1]:
            raise ValueError("y_prev length does not match w_back")
        pre = pre + rw.w_back @ y_prev
    elif y_prev is not None:
        raise ValueError("y_prev given but reservoir has no feedback weights")
    return np.tanh(pre)


def save_reservoir(path, rw: ReservoirWeights, hp: HyperParams):
    path = Path(path)
    path.write_text(json.dumps({"hyperparams": hp.to_dict(), **rw.to_dict()}))
    return path


def load_reservoir(path):
    """Read ``(weights, hyperparams)`` from a reservoir or trained-model JSON."""
    d = json.loads(Path(path).read_text())
    return ReservoirWeights.from_dict(d), HyperParams.from_dict(d["hyperparams"])
