"""Time-series sources and train/validation/test splitting.

Three sources: the Mackey-Glass delay equation, a single-column CSV file,
and a synthetic load-like signal (two seasonal sinusoids, trend, noise).

The default split is 10% washout / 70% train / 10% validation / 10% test:
the washout prefix is carved out of the nominal 80% training region so the
four parts add up to the whole series.
"""

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import kernels

MIN_LENGTH = 100


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class SplitIndices:
    washout: range
    train: range
    validation: range
    test: range

    def __post_init__(self):
        parts = [self.washout, self.train, self.validation, self.test]
        if any(p.step != 1 for p in parts):
            raise ValueError("split ranges must be contiguous")
        if parts[0].start != 0:
            raise ValueError("washout must start at index 0")
        for a, b in zip(parts, parts[1:]):
            if a.stop != b.start:
                raise ValueError("split ranges must be adjacent and ordered")

    @property
    def length(self):
        return self.test.stop

    def to_dict(self):
        return {k: [r.start, r.stop] for k, r in self._items()}

    def _items(self):
        return [("washout", self.washout), ("train", self.train),
                ("validation", self.validation), ("test", self.test)]


@dataclass(frozen=True)
class Normalization:
    shift: float
    scale: float


@dataclass(frozen=True)
class SeriesDataset:
    values: np.ndarray
    name: str
    splits: SplitIndices
    normalization: Optional[Normalization] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1:
            raise DataError("values must be one-dimensional")
        if v.shape[0] < MIN_LENGTH:
            raise DataError(f"series has {v.shape[0]} samples, need at least {MIN_LENGTH}")
        if not np.all(np.isfinite(v)):
            raise DataError("series contains non-finite values")
        if self.splits.length != v.shape[0]:
            raise DataError(f"splits cover {self.splits.length} samples, series has {v.shape[0]}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]

    def with_splits(self, splits):
        return replace(self, splits=splits)


def make_splits(length, washout_fraction=0.10, train_fraction=0.70,
                val_fraction=0.10, test_fraction=0.10):
    fractions = [washout_fraction, train_fraction, val_fraction, test_fraction]
    if any(f < 0 for f in fractions):
        raise DataError("split fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"split fractions sum to {sum(fractions)}, expected 1")
    bounds = [0]
    acc = 0.0
    for f in fractions:
        acc += f
        bounds.append(int(round(acc * length)))
    bounds[-1] = length
    ranges = [range(a, b) for a, b in zip(bounds, bounds[1:])]
    if len(ranges[2]) == 0 or len(ranges[3]) == 0:
        raise DataError("empty evaluation split: validation and test need at least one sample")
    if len(ranges[1]) == 0:
        raise DataError("empty training split")
    return SplitIndices(*ranges)


def make_remainder_splits(length, washout_fraction=0.10, train_fraction=0.80,
                          val_fraction=0.10, test_fraction=0.10):
    """Alternative reading: washout first, then train/val/test share the rest."""
    rest = 1.0 - washout_fraction
    total = train_fraction + val_fraction + test_fraction
    return make_splits(
        length, washout_fraction,
        rest * train_fraction / total, rest * val_fraction / total, rest * test_fraction / total,
    )


@dataclass(frozen=True)
class MackeyGlassParams:
    alpha: float = 17.0
    beta: float = 0.2
    gamma: float = 0.1
    exponent: float = 10.0
    dt: float = 0.1
    subsample: int = 10
    n_samples: int = 10000
    initial_value: float = 1.2
    transient: float = 1000.0

    def __post_init__(self):
        if self.alpha <= 0 or self.dt <= 0:
            raise ValueError("alpha and dt must be positive")
        if self.alpha < self.dt:
            raise ValueError("delay shorter than one integration step is not supported")
        if self.n_samples < 1 or self.subsample < 1:
            raise ValueError("n_samples and subsample must be >= 1")
        if self.transient < 0:
            raise ValueError("transient must be non-negative")


def mackey_glass_series(p: MackeyGlassParams):
    """Raw samples (no dataset wrapper, no length check)."""
    skip = int(round(p.transient / p.dt))
    n_steps = skip + (p.n_samples - 1) * p.subsample
    grid = kernels.mackey_glass_rk4(
        n_steps, float(p.dt), float(p.alpha), float(p.beta), float(p.gamma),
        float(p.exponent), float(p.initial_value),
    )
    return grid[skip::p.subsample][: p.n_samples].copy()


def mackey_glass(p: MackeyGlassParams = MackeyGlassParams(), splits=None) -> SeriesDataset:
    values = mackey_glass_series(p)
    return SeriesDataset(
        values=values, name=f"mackey-glass-{p.alpha:g}",
        splits=splits or make_splits(len(values)),
    )


def load_csv(path: Union[str, Path], column: Union[str, int] = 0, has_header=True,
             splits=None) -> SeriesDataset:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path} is empty")

    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        if isinstance(column, str) and not column.lstrip("-").isdigit():
            if column not in header:
                raise DataError(f"column {column!r} not in header {header}")
            col = header.index(column)
        else:
            col = int(column)
    else:
        try:
            col = int(column)
        except ValueError:
            raise DataError("column must be an index when the file has no header") from None

    values = []
    # rows are numbered from 1 among data rows; the header does not count
    for line, row in enumerate(rows, start=1):
        if col >= len(row) or col < -len(row):
            raise DataError(f"row {line}: missing column {column!r}")
        try:
            v = float(row[col])
        except ValueError:
            raise DataError(f"row {line}: non-numeric value {row[col]!r}") from None
        if not math.isfinite(v):
            raise DataError(f"row {line}: non-finite value {row[col]!r}")
        values.append(v)

    if len(values) < MIN_LENGTH:
        raise DataError(f"{path} has {len(values)} data rows, need at least {MIN_LENGTH}")
    values = np.array(values)
    return SeriesDataset(values=values, name=path.stem, splits=splits or make_splits(len(values)))


def synth_load(n, seed=0, daily_period=24, weekly_period=168, noise_std=0.1,
               daily_amplitude=1.0, weekly_amplitude=0.5, trend=0.0, level=0.0,
               splits=None) -> SeriesDataset:
    """Load-like surrogate: two sinusoids + linear trend + seeded Gaussian noise.

    For whole numbers of both periods and no trend the variance is
    ``daily_amplitude**2/2 + weekly_amplitude**2/2 + noise_std**2``.
    """
    if n < MIN_LENGTH:
        raise DataError(f"n must be >= {MIN_LENGTH}, got {n}")
    if daily_period < 1 or weekly_period < 1:
        raise DataError("periods must be positive")
    if noise_std < 0:
        raise DataError("noise_std must be non-negative")
    t = np.arange(n, dtype=np.float64)
    rng = np.random.default_rng(seed)
    values = (
        level
        + daily_amplitude * np.sin(2 * np.pi * (t % daily_period) / daily_period)
        + weekly_amplitude * np.sin(2 * np.pi * (t % weekly_period) / weekly_period)
        + trend * t
        + noise_std * rng.standard_normal(n)
    )
    return SeriesDataset(values=values, name="synth-load", splits=splits or make_splits(n))


def normalize(ds: SeriesDataset) -> SeriesDataset:
    """Zero mean, unit variance using statistics of the train range only."""
    train = ds.values[ds.splits.train.start:ds.splits.train.stop]
    shift = float(np.mean(train))
    scale = float(np.std(train))
    if scale == 0.0 or not np.isfinite(scale):
        raise DataError("zero variance in training range; cannot normalize")
    prior = ds.normalization
    if prior is not None:
        # compose so that denormalize() always returns the raw signal
        shift, scale = prior.shift + prior.scale * shift, prior.scale * scale
        raw = ds.values * prior.scale + prior.shift
    else:
        raw = ds.values
    return replace(ds, values=(raw - shift) / scale, normalization=Normalization(shift, scale))


def denormalize(ds: SeriesDataset) -> SeriesDataset:
    if ds.normalization is None:
        return ds
    n = ds.normalization
    return replace(ds, values=ds.values * n.scale + n.shift, normalization=None)


def write_csv(ds: SeriesDataset, path: Union[str, Path], precision=12):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value"])
        for v in ds.values:
            writer.writerow([f"{v:.{precision}g}"])
    return path
