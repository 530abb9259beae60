import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from esnprune.evaluation import Metric, aggregate, nrmse


def test_perfect_prediction():
    m = nrmse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 1.0)
    assert m == Metric(0.0, 3)


def test_mean_predictor_scores_one():
    rng = np.random.default_rng(1)
    t = rng.normal(size=500)
    assert nrmse(np.full_like(t, t.mean()), t, t.var()).nrmse == pytest.approx(1.0, abs=1e-12)


def test_constant_offset():
    t = np.linspace(0, 1, 50)
    assert nrmse(t + 0.1, t, 1.0).nrmse == pytest.approx(0.1, abs=1e-12)


def test_errors():
    with pytest.raises(ValueError, match="mismatch"):
        nrmse([1.0], [1.0, 2.0], 1.0)
    with pytest.raises(ValueError):
        nrmse([1.0], [1.0], 0.0)
    with pytest.raises(ValueError):
        nrmse([], [], 1.0)


vec = arrays(np.float64, 12, elements=st.floats(-10, 10))


@settings(max_examples=50, deadline=None)
@given(vec, vec, st.integers(-100, 100))
def test_shift_invariance(p, t, c):
    # integer shifts keep the differences exact in floating point
    assert nrmse(p + c, t + c, 2.0).nrmse == pytest.approx(nrmse(p, t, 2.0).nrmse, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(vec, vec, st.floats(0.1, 10))
def test_scale_invariance(p, t, c):
    assert nrmse(c * p, c * t, c * c * 1.5).nrmse == pytest.approx(nrmse(p, t, 1.5).nrmse, rel=1e-12, abs=1e-12)


def test_aggregate_examples():
    s = aggregate([Metric(0.2, 10)])
    assert (s.mean, s.std, s.min, s.max, s.n_reps) == (0.2, 0.0, 0.2, 0.2, 1)
    s = aggregate([0.1, 0.3])
    assert s.mean == pytest.approx(0.2)
    assert s.std == pytest.approx(0.1414213562, rel=1e-9)
    with pytest.raises(ValueError):
        aggregate([])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=1, max_size=20), st.randoms())
def test_aggregate_permutation_invariant(vals, rnd):
    shuffled = list(vals)
    rnd.shuffle(shuffled)
    a, b = aggregate(vals), aggregate(shuffled)
    assert a == b
    assert a.min <= a.mean <= a.max
    assert a.std >= 0
