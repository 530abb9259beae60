import json

import numpy as np
import pytest

from esnprune import kernels
from esnprune.linalg import spectral_radius
from esnprune.reservoir import (
    DegenerateReservoirError, HyperParams, ReservoirWeights, generate_reservoir, load_reservoir,
    save_reservoir, scale_to_radius, update_state,
)


def test_generation_is_deterministic():
    hp = HyperParams(n_reservoir=60, seed=7, feedback_enabled=True)
    a, b = generate_reservoir(hp), generate_reservoir(hp)
    assert a.w.tobytes() == b.w.tobytes()
    assert a.w_in.tobytes() == b.w_in.tobytes()
    assert a.w_back.tobytes() == b.w_back.tobytes()


def test_different_seeds_differ():
    a = generate_reservoir(HyperParams(n_reservoir=30, seed=1))
    b = generate_reservoir(HyperParams(n_reservoir=30, seed=2))
    assert not np.array_equal(a.w, b.w)


def test_feedback_does_not_perturb_other_matrices():
    a = generate_reservoir(HyperParams(n_reservoir=40, seed=3))
    b = generate_reservoir(HyperParams(n_reservoir=40, seed=3, feedback_enabled=True))
    assert np.array_equal(a.w, b.w) and np.array_equal(a.w_in, b.w_in)
    assert a.w_back is None and b.w_back.shape == (40, 1)


def test_dense_reservoir_radius():
    rw = generate_reservoir(HyperParams(n_reservoir=50, connectivity=1.0, seed=0))
    assert np.count_nonzero(rw.w) == 50 * 50
    assert spectral_radius(rw.w) == pytest.approx(0.9, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_sparsity_matches_connectivity(seed):
    rw = generate_reservoir(HyperParams(n_reservoir=200, connectivity=0.1, seed=seed))
    frac = np.count_nonzero(rw.w) / rw.w.size
    assert 0.08 <= frac <= 0.12


def test_weight_ranges():
    hp = HyperParams(n_reservoir=100, input_scaling=0.7, seed=4)
    rw = generate_reservoir(hp)
    assert np.all(np.abs(rw.w_in) <= 0.7)
    assert np.any(rw.w > 0) and np.any(rw.w < 0)
    assert spectral_radius(rw.w) <= hp.spectral_radius_target + 1e-6


def test_degenerate_reservoir():
    # 2 nodes at tiny connectivity: the mask is empty for this seed
    hp = HyperParams(n_reservoir=2, connectivity=1e-6, seed=0)
    with pytest.raises(DegenerateReservoirError):
        generate_reservoir(hp)


@pytest.mark.parametrize("kwargs", [
    dict(spectral_radius_target=1.0), dict(spectral_radius_target=0.0), dict(connectivity=0.0),
    dict(connectivity=1.5), dict(n_reservoir=1), dict(horizon=0), dict(ridge_lambda=-1.0),
    dict(washout_fraction=1.0), dict(input_scaling=0.0),
])
def test_hyperparam_validation(kwargs):
    with pytest.raises(ValueError):
        HyperParams(**kwargs)


def test_hyperparams_reject_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        HyperParams.from_dict({"n_reservoir": 10, "leak": 0.3})


def test_scale_to_radius_examples(rng):
    np.testing.assert_allclose(scale_to_radius(np.eye(3), 0.9), 0.9 * np.eye(3), atol=1e-15)
    w = rng.uniform(-1, 1, (10, 10))
    np.testing.assert_allclose(scale_to_radius(w, spectral_radius(w)), w, atol=1e-12)
    assert spectral_radius(scale_to_radius(w, 0.8)) == pytest.approx(0.8, rel=1e-6)
    with pytest.raises(DegenerateReservoirError):
        scale_to_radius(np.zeros((3, 3)), 0.5)


def _one_node(w=0.0, w_in=1.0):
    return ReservoirWeights(w=np.array([[w]]), w_in=np.array([[w_in]]))


def test_update_state_examples():
    rw = generate_reservoir(HyperParams(n_reservoir=20, seed=0))
    np.testing.assert_array_equal(update_state(rw, np.zeros(20), [0.0]), np.zeros(20))
    x = update_state(_one_node(), [0.0], [0.5])
    assert x[0] == pytest.approx(0.46211716, abs=1e-8)
    big = update_state(rw, np.ones(20), [50.0])
    assert np.all(np.abs(big) <= 1.0)


def test_update_state_dimension_errors():
    rw = generate_reservoir(HyperParams(n_reservoir=10, seed=0))
    with pytest.raises(ValueError):
        update_state(rw, np.zeros(9), [0.0])
    with pytest.raises(ValueError):
        update_state(rw, np.zeros(10), [0.0, 1.0])
    with pytest.raises(ValueError):
        update_state(rw, np.zeros(10), [0.0], y_prev=[1.0])
    fb = generate_reservoir(HyperParams(n_reservoir=10, seed=0, feedback_enabled=True))
    with pytest.raises(ValueError):
        update_state(fb, np.zeros(10), [0.0])
    x = update_state(fb, np.zeros(10), [0.1], y_prev=[0.2])
    np.testing.assert_allclose(x, np.tanh(fb.w_in[:, 0] * 0.1 + fb.w_back[:, 0] * 0.2))


def test_weights_are_read_only():
    rw = generate_reservoir(HyperParams(n_reservoir=10, seed=0))
    with pytest.raises(ValueError):
        rw.w[0, 0] = 1.0


def test_kernel_matches_update_state(mg_short):
    rw = generate_reservoir(HyperParams(n_reservoir=30, seed=2))
    u = mg_short.values[:50, None]
    states = kernels.run_reservoir(rw.w, rw.w_in, np.ascontiguousarray(u), np.zeros(30))
    x = np.zeros(30)
    for t in range(50):
        x = update_state(rw, x, u[t])
        np.testing.assert_allclose(states[t], x, atol=1e-14)


def test_states_bounded_and_deterministic(mg_short):
    rw = generate_reservoir(HyperParams(n_reservoir=50, seed=5))
    u = np.ascontiguousarray(mg_short.values[:, None])
    a = kernels.run_reservoir(rw.w, rw.w_in, u, np.zeros(50))
    b = kernels.run_reservoir(rw.w, rw.w_in, u, np.zeros(50))
    assert np.all(np.abs(a) < 1)
    assert np.array_equal(a, b)


def test_fading_memory(mg_full):
    hp = HyperParams(n_reservoir=200, spectral_radius_target=0.9, seed=11)
    rw = generate_reservoir(hp)
    u = np.ascontiguousarray(mg_full.values[:1000, None])
    gen = np.random.default_rng(0)
    xa = kernels.run_reservoir(rw.w, rw.w_in, u, gen.uniform(-1, 1, 200))
    xb = kernels.run_reservoir(rw.w, rw.w_in, u, gen.uniform(-1, 1, 200))
    assert np.linalg.norm(xa[-1] - xb[-1]) < 1e-6


def test_json_round_trip(tmp_path):
    hp = HyperParams(n_reservoir=25, seed=9, feedback_enabled=True)
    rw = generate_reservoir(hp)
    path = save_reservoir(tmp_path / "r.json", rw, hp)
    doc = json.loads(path.read_text())
    assert set(doc) == {"hyperparams", "w", "w_in", "w_back"}
    assert len(doc["w"]) == 25 and len(doc["w"][0]) == 25
    rw2, hp2 = load_reservoir(path)
    assert hp2 == hp
    for a, b in [(rw.w, rw2.w), (rw.w_in, rw2.w_in), (rw.w_back, rw2.w_back)]:
        np.testing.assert_allclose(b, a, rtol=1e-15, atol=0)
