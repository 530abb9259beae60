import json
import os
import subprocess
import sys

import numpy as np
import pytest

from esnprune import kernels
from esnprune._jit import DISABLE_ENV, USE_NUMBA
from esnprune.reservoir import HyperParams, generate_reservoir


@pytest.fixture(scope="module")
def reservoir():
    return generate_reservoir(HyperParams(n_reservoir=30, seed=2, connectivity=0.3))


def test_mackey_glass_parity():
    args = (3000, 0.1, 17.0, 0.2, 0.1, 10.0, 1.2)
    fast = kernels.mackey_glass_rk4(*args)
    slow = kernels.mackey_glass_rk4.py_func(*args)
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12)


def test_run_reservoir_parity(reservoir):
    u = np.sin(np.arange(400) / 9.0)[:, None]
    x0 = np.zeros(reservoir.n)
    dense = kernels._run_reservoir_dense(reservoir.w, reservoir.w_in, u, x0)
    got = kernels.run_reservoir(reservoir.w, reservoir.w_in, u, x0)
    assert got.shape == (400, reservoir.n)
    np.testing.assert_allclose(got, dense, rtol=0, atol=1e-12)
    csr = kernels.csr_arrays(reservoir.w)
    fast = kernels._run_reservoir_sparse(*csr, reservoir.w_in, u[:50], x0)
    slow = kernels._run_reservoir_sparse.py_func(*csr, reservoir.w_in, u[:50], x0)
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-14)


def test_csr_arrays():
    w = np.array([[0.0, 2.0, 0.0], [0.0, 0.0, 0.0], [3.0, 0.0, 4.0]])
    indptr, indices, values = kernels.csr_arrays(w)
    assert indptr.tolist() == [0, 1, 1, 3]
    assert indices.tolist() == [1, 0, 2]
    assert values.tolist() == [2.0, 3.0, 4.0]


def test_tanh_form():
    v = np.linspace(-25, 25, 2001)
    got = np.array([kernels._tanh(x) for x in v])
    np.testing.assert_allclose(got, np.tanh(v), rtol=0, atol=5e-16)
    assert kernels._tanh(1e4) == 1.0 and kernels._tanh(-1e4) == -1.0


def test_feedback_parity(reservoir):
    u = np.sin(np.arange(200) / 9.0)[:, None]
    fb = np.cos(np.arange(200) / 9.0)[:, None]
    w_back = np.linspace(-0.2, 0.2, reservoir.n)[:, None]
    x0 = np.zeros(reservoir.n)
    fast = kernels.run_reservoir_feedback(reservoir.w, reservoir.w_in, w_back, u, fb, x0)
    slow = kernels.run_reservoir_feedback.py_func(reservoir.w, reservoir.w_in, w_back, u, fb, x0)
    np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12)


def test_free_run_batch_steps(reservoir):
    rng = np.random.default_rng(0)
    n = reservoir.n
    w_out = rng.normal(scale=0.05, size=(1, 2 + n))
    states = rng.uniform(-0.5, 0.5, size=(7, n))
    y0 = rng.uniform(0.5, 1.0, size=(7, 1))
    out = kernels.free_run_batch(reservoir.w, reservoir.w_in, np.zeros((n, 0)), w_out, states, y0, 30)
    assert out.shape == (30, 7, 1)
    np.testing.assert_array_equal(out[0], y0)
    # second step by hand for one rollout
    x1 = np.tanh(reservoir.w @ states[3] + reservoir.w_in[:, 0] * y0[3, 0])
    y1 = w_out[0, 0] + w_out[0, 1] * y0[3, 0] + w_out[0, 2:] @ x1
    assert out[1, 3, 0] == pytest.approx(y1, abs=1e-12)


def test_env_flag_selects_numpy_path():
    code = (
        "import json, numpy as np\n"
        "from esnprune import _jit, kernels\n"
        "v = kernels.mackey_glass_rk4(500, 0.1, 17.0, 0.2, 0.1, 10.0, 1.2)\n"
        "w = np.array([[0.0, 0.5], [-0.4, 0.0]])\n"
        "x = kernels.run_reservoir(w, np.ones((2, 1)), np.full((20, 1), 0.3), np.zeros(2))\n"
        "print(json.dumps([_jit.USE_NUMBA, float(v[-1]), x[-1].tolist()]))\n"
    )
    env = dict(os.environ, **{DISABLE_ENV: "1"})
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    use_numba, last, state = json.loads(out.stdout)
    assert use_numba is False
    w = np.array([[0.0, 0.5], [-0.4, 0.0]])
    ours = kernels.run_reservoir(w, np.ones((2, 1)), np.full((20, 1), 0.3), np.zeros(2))
    np.testing.assert_allclose(state, ours[-1], atol=1e-14)
    ref = kernels.mackey_glass_rk4(500, 0.1, 17.0, 0.2, 0.1, 10.0, 1.2)[-1]
    assert last == pytest.approx(ref, abs=1e-12)


@pytest.mark.skipif(not USE_NUMBA, reason="numba disabled")
def test_kernels_are_compiled():
    assert hasattr(kernels._run_reservoir_sparse, "signatures")
    assert hasattr(kernels.mackey_glass_rk4, "signatures")
