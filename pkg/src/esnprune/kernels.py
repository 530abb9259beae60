"""Hot inner loops: delay-equation integration and reservoir recurrences."""

import numpy as np

from ._jit import USE_NUMBA, njit


@njit
def mackey_glass_rk4(n_steps, dt, delay, beta, gamma, exponent, initial_value):
    """Integrate the Mackey-Glass equation with classic RK4.

    Returns the solution on the grid ``t = 0, dt, ..., n_steps*dt``.  The
    history on ``[-delay, 0]`` is the constant ``initial_value``; delayed
    values between grid points are linearly interpolated.
    """
    out = np.empty(n_steps + 1)
    out[0] = initial_value
    lag = delay / dt

    for i in range(n_steps):
        x = out[i]
        # delayed state at t, t + dt/2, t + dt  (grid positions i - lag + s)
        d0 = _delayed(out, i - lag, initial_value)
        dh = _delayed(out, i + 0.5 - lag, initial_value)
        d1 = _delayed(out, i + 1.0 - lag, initial_value)

        k1 = beta * d0 / (1.0 + d0 ** exponent) - gamma * x
        xa = x + 0.5 * dt * k1
        k2 = beta * dh / (1.0 + dh ** exponent) - gamma * xa
        xb = x + 0.5 * dt * k2
        k3 = beta * dh / (1.0 + dh ** exponent) - gamma * xb
        xc = x + dt * k3
        k4 = beta * d1 / (1.0 + d1 ** exponent) - gamma * xc
        out[i + 1] = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out


@njit
def _delayed(grid, pos, initial_value):
    if pos <= 0.0:
        return initial_value
    j = int(np.floor(pos))
    frac = pos - j
    if frac == 0.0:
        return grid[j]
    # delay shorter than one step: the right neighbour is not known yet
    return (1.0 - frac) * grid[j] + frac * grid[j + 1]


def run_reservoir(w, w_in, inputs, x0):
    """Teacher-forced state sequence ``x(t) = tanh(W x(t-1) + W_in u(t))``.

    ``inputs`` has shape (T, d); row t of the result is the state after
    consuming ``inputs[t]``.  With numba the recurrence visits only the
    nonzeros of W (reservoirs are sparse); otherwise it is a dense numpy
    loop.
    """
    if USE_NUMBA:
        indptr, indices, values = csr_arrays(w)
        return _run_reservoir_sparse(indptr, indices, values, w_in, inputs, x0)
    return _run_reservoir_dense(w, w_in, inputs, x0)


def csr_arrays(w):
    """Row-compressed (indptr, column indices, values) of the nonzeros of ``w``."""
    rows, cols = np.nonzero(w)
    indptr = np.zeros(w.shape[0] + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=w.shape[0]), out=indptr[1:])
    return indptr, cols.astype(np.int64), np.ascontiguousarray(w[rows, cols])


def _run_reservoir_dense(w, w_in, inputs, x0):
    n_steps = inputs.shape[0]
    states = np.empty((n_steps, w.shape[0]))
    x = x0.copy()
    for t in range(n_steps):
        x = np.tanh(np.dot(w, x) + np.dot(w_in, inputs[t]))
        states[t] = x
    return states


@njit
def _run_reservoir_sparse(indptr, indices, values, w_in, inputs, x0):
    n_steps, dim = inputs.shape
    n = indptr.shape[0] - 1
    states = np.empty((n_steps, n))
    x = x0.copy()
    pre = np.empty(n)
    for t in range(n_steps):
        for i in range(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += values[k] * x[indices[k]]
            for j in range(dim):
                acc += w_in[i, j] * inputs[t, j]
            pre[i] = acc
        for i in range(n):
            x[i] = _tanh(pre[i])
        states[t] = x
    return states


@njit
def _tanh(v):
    # compiled scalar np.tanh is ~2x slower than this form; absolute error
    # stays at the 1e-16 level and exp overflow saturates correctly to +-1
    return 1.0 - 2.0 / (np.exp(2.0 * v) + 1.0)


@njit
def run_reservoir_feedback(w, w_in, w_back, inputs, feedback, x0):
    """As :func:`run_reservoir` with an extra ``W_back y(t-1)`` drive.

    ``feedback[t]`` is the output fed back while consuming ``inputs[t]``.
    """
    n_steps = inputs.shape[0]
    states = np.empty((n_steps, w.shape[0]))
    x = x0.copy()
    for t in range(n_steps):
        x = np.tanh(np.dot(w, x) + np.dot(w_in, inputs[t]) + np.dot(w_back, feedback[t]))
        states[t] = x
    return states


def free_run_batch(w, w_in, w_back, w_out, states, y0, horizon):
    """Generative rollout from many synchronized states at once.

    ``states`` (B, n) are teacher-forced states and ``y0`` (B, d) the
    one-step predictions made from them.  Each later step feeds the
    previous prediction back as input (and as feedback when ``w_back`` has
    columns).  Returns predictions of shape (horizon, B, d); slice 0 is
    ``y0``.

    Left as plain numpy: each step is two small matrix products plus a
    batched tanh, and numpy's vectorized tanh beat the compiled loop about
    2x in ``benchmarks/bench_kernels.py``.
    """
    n_batch, dim = y0.shape
    n = w.shape[0]
    has_back = w_back.shape[1] > 0
    bias = w_out[:, 0]
    w_u = w_out[:, 1:1 + dim]
    w_x = w_out[:, 1 + dim:1 + dim + n]

    preds = np.empty((horizon, n_batch, dim))
    preds[0] = y0
    x = states.copy()
    y = y0.copy()
    w_t = np.ascontiguousarray(w.T)
    w_in_t = np.ascontiguousarray(w_in.T)
    w_back_t = np.ascontiguousarray(w_back.T)
    w_u_t = np.ascontiguousarray(w_u.T)
    w_x_t = np.ascontiguousarray(w_x.T)
    w_y_t = np.ascontiguousarray(w_out[:, 1 + dim + n:].T)
    for h in range(1, horizon):
        pre = np.dot(x, w_t) + np.dot(y, w_in_t)
        if has_back:
            pre = pre + np.dot(y, w_back_t)
        x = np.tanh(pre)
        y_next = np.dot(y, w_u_t) + np.dot(x, w_x_t) + bias
        if has_back:
            y_next = y_next + np.dot(y, w_y_t)
        y = y_next
        preds[h] = y
    return preds
