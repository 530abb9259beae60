import pytest

from esnprune.config import ConfigError, ExperimentConfig, apply_overrides, from_tree, load_config


def test_defaults():
    cfg = load_config()
    assert cfg.n_reps == 10 and cfg.reservoir_sizes == [200, 300]
    assert cfg.seeds() == list(range(10))
    assert cfg.hp_template(200, 3).n_reservoir == 200
    assert cfg.hp_template(200, 3).seed == 3


def test_overrides_parse_yaml_scalars():
    tree = apply_overrides({}, ["pruning.step=4", "measures=[C1, C3]", "plot=false", "dataset.kind=synth-load"])
    assert tree == {"pruning": {"step": 4}, "measures": ["C1", "C3"], "plot": False,
                    "dataset": {"kind": "synth-load"}}
    with pytest.raises(ConfigError):
        apply_overrides({}, ["novalue"])


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="colour"):
        from_tree({"colour": 1})
    with pytest.raises(ConfigError):
        from_tree({"dataset": {"kind": "mackey-glass", "size": 3}})
    with pytest.raises((ConfigError, ValueError)):
        from_tree({"hyperparams": {"spectral_radius": 0.5}})


def test_invalid_values():
    with pytest.raises(ConfigError):
        from_tree({"n_reps": 0})
    with pytest.raises(ConfigError):
        from_tree({"measures": ["eigen"]})
    with pytest.raises(ConfigError):
        from_tree({"dataset": {"kind": "parquet"}})
    with pytest.raises(ConfigError):
        from_tree({"pruning": {"max_prune_fraction": 1.5}})


def test_measure_aliases_canonicalized():
    cfg = from_tree({"measures": ["c_in", "c2"]})
    assert cfg.measures == ["C_in", "C2"]


def test_load_json_and_relative_csv(tmp_path):
    (tmp_path / "d.csv").write_text("v\n" + "\n".join(str(i) for i in range(200)))
    p = tmp_path / "c.json"
    p.write_text('{"dataset": {"kind": "csv", "path": "d.csv"}, "n_reps": 2}')
    cfg = load_config(p)
    assert cfg.dataset.path == str(tmp_path / "d.csv")
    assert cfg.n_reps == 2
    assert isinstance(cfg, ExperimentConfig)


def test_missing_config_file(tmp_path):
    with pytest.raises((ConfigError, FileNotFoundError)):
        load_config(tmp_path / "nope.yaml")
