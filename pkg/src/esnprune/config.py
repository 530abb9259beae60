"""Experiment configuration: a YAML (or JSON) tree plus dotted overrides.

Example::

    dataset:
      kind: mackey-glass      # mackey-glass | csv | synth-load
      n_samples: 10000
    hyperparams:
      spectral_radius_target: 0.9
    pruning:
      max_prune_fraction: 0.4
    measures: [C2]
    reservoir_sizes: [200, 300]
    n_reps: 10
    base_seed: 0
    horizon: 84
    output_dir: results

Unknown keys are rejected so typos fail fast.
"""

import copy
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional

import yaml

from .centrality import canonical_measure
from .pruning import PruneConfig
from .reservoir import HyperParams
from .task import SCORE_MODES

OUTPUT_DIR_ENV = "ESNPRUNE_OUTPUT_DIR"
DATASET_KINDS = ("mackey-glass", "csv", "synth-load")


class ConfigError(ValueError):
    pass


@dataclass
class DatasetSpec:
    kind: str = "mackey-glass"
    n_samples: int = 10000
    # mackey-glass
    alpha: float = 17.0
    dt: float = 0.1
    subsample: int = 10
    initial_value: float = 1.2
    # csv
    path: Optional[str] = None
    column: object = 0
    has_header: bool = True
    # synth-load
    seed: int = 0
    daily_period: int = 24
    weekly_period: int = 168
    noise_std: float = 0.1
    trend: float = 0.0
    # preprocessing and splits; None means "standardize unless mackey-glass"
    normalize: Optional[bool] = None
    split_mode: str = "carve"
    fractions: List[float] = field(default_factory=lambda: [0.10, 0.70, 0.10, 0.10])

    def validate(self):
        if self.kind not in DATASET_KINDS:
            raise ConfigError(f"dataset.kind must be one of {DATASET_KINDS}, got {self.kind!r}")
        if self.kind == "csv":
            if not self.path:
                raise ConfigError("dataset.path is required for csv datasets")
            if not Path(self.path).is_file():
                raise ConfigError(f"dataset.path does not exist: {self.path}")
        if self.split_mode not in ("carve", "remainder"):
            raise ConfigError("dataset.split_mode must be 'carve' or 'remainder'")
        if len(self.fractions) != 4:
            raise ConfigError("dataset.fractions needs four entries: washout, train, validation, test")

    @property
    def should_normalize(self):
        return self.kind != "mackey-glass" if self.normalize is None else bool(self.normalize)


@dataclass
class ExperimentConfig:
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    hyperparams: dict = field(default_factory=dict)
    pruning: dict = field(default_factory=dict)
    measures: List[str] = field(default_factory=lambda: ["C2"])
    reservoir_sizes: List[int] = field(default_factory=lambda: [200, 300])
    n_reps: int = 10
    base_seed: int = 0
    horizon: int = 84
    eval_stride: int = 10
    score_mode: str = "final"
    output_dir: str = "results"
    workers: int = 1
    plot: bool = True
    save_reservoirs: bool = False

    def validate(self):
        self.dataset.validate()
        if self.n_reps < 1:
            raise ConfigError("n_reps must be >= 1")
        if not self.reservoir_sizes or any(int(n) < 2 for n in self.reservoir_sizes):
            raise ConfigError("reservoir_sizes must be a non-empty list of sizes >= 2")
        if not self.measures:
            raise ConfigError("measures must not be empty")
        if self.horizon < 1 or self.eval_stride < 1:
            raise ConfigError("horizon and eval_stride must be >= 1")
        if self.score_mode not in SCORE_MODES:
            raise ConfigError(f"score_mode must be one of {SCORE_MODES}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.measures = [canonical_measure(m) for m in self.measures]
            self.hp_template()
            self.prune_config(self.measures[0])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def hp_template(self, n_reservoir=None, seed=None):
        d = dict(self.hyperparams)
        d["horizon"] = self.horizon
        if n_reservoir is not None:
            d["n_reservoir"] = int(n_reservoir)
        if seed is not None:
            d["seed"] = int(seed)
        return HyperParams.from_dict(d)

    def prune_config(self, measure):
        return PruneConfig(**{**self.pruning, "measure": measure})

    def seeds(self):
        return [self.base_seed + k for k in range(self.n_reps)]

    def to_dict(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = {g.name: getattr(v, g.name) for g in fields(v)} if f.name == "dataset" else copy.deepcopy(v)
        return out


def _parse_scalar(text):
    return yaml.safe_load(text)


def apply_overrides(tree, overrides):
    """Apply ``key.sub=value`` strings; values are parsed as YAML scalars."""
    tree = copy.deepcopy(tree)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        parts = key.strip().split(".")
        node = tree
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override {key!r} descends into a non-mapping")
        node[parts[-1]] = _parse_scalar(value)
    return tree


def from_tree(tree) -> ExperimentConfig:
    tree = dict(tree or {})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(tree) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    ds_tree = dict(tree.pop("dataset", {}) or {})
    ds_known = {f.name for f in fields(DatasetSpec)}
    bad = set(ds_tree) - ds_known
    if bad:
        raise ConfigError(f"unknown dataset keys: {sorted(bad)}")
    try:
        cfg = ExperimentConfig(dataset=DatasetSpec(**ds_tree), **tree)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def load_config(path=None, overrides=None) -> ExperimentConfig:
    tree = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            tree = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        if not isinstance(tree, dict):
            raise ConfigError("config root must be a mapping")
        # relative csv paths are relative to the config file
        ds = tree.get("dataset") or {}
        if isinstance(ds, dict) and ds.get("path") and not Path(ds["path"]).is_absolute():
            ds["path"] = str(path.parent / ds["path"])
    tree = apply_overrides(tree, overrides)
    cfg = from_tree(tree)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir:
        cfg.output_dir = env_dir
    return cfg.validate()
