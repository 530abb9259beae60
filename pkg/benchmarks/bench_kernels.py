"""Compare the numba-compiled kernels with their plain numpy versions.

``free_run_batch`` is not compiled (numpy was faster), so it is not listed.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 200]

The numpy timings come from a child process started with
ESNPRUNE_DISABLE_NUMBA=1, so helper kernels called from inside a kernel
are uncompiled too (``.py_func`` alone would still call compiled helpers).
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from esnprune import kernels
from esnprune._jit import USE_NUMBA
from esnprune.data import mackey_glass
from esnprune.reservoir import HyperParams, generate_reservoir
from esnprune.task import ForecastTask


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(size):
    rw = generate_reservoir(HyperParams(n_reservoir=size, seed=0))
    u = np.sin(np.arange(10000) / 7.0)[:, None]
    x0 = np.zeros(size)
    hp = HyperParams(n_reservoir=size, seed=0)
    task = ForecastTask(mackey_glass())
    # name -> (callable, args, checksum tolerance between the two paths)
    return {
        "mackey_glass_rk4 (100k steps)": (
            kernels.mackey_glass_rk4, (100000, 0.1, 17.0, 0.2, 0.1, 10.0, 1.2), 1e-9),
        f"run_reservoir (T=10000, N={size})": (kernels.run_reservoir, (rw.w, rw.w_in, u, x0), 1e-9),
        # the lightly regularized readout amplifies last-bit state differences
        # (about 0.5% in NRMSE), hence the looser check
        f"ForecastTask.score (N={size})": (lambda: task.score(rw, hp).val_nrmse, (), 2e-2),
    }


def time_all(size, repeat):
    out = {}
    for name, (kernel, call_args, _) in cases(size).items():
        result = kernel(*call_args)  # compile outside the timed region
        out[name] = {"seconds": best_of(lambda: kernel(*call_args), repeat),
                     "checksum": float(np.sum(result))}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=200)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        print(json.dumps({"use_numba": USE_NUMBA, "timings": time_all(args.size, args.repeat)}))
        return

    if not USE_NUMBA:
        print("numba disabled in this process; both columns time the numpy path")
    fast = time_all(args.size, args.repeat)
    env = dict(os.environ, ESNPRUNE_DISABLE_NUMBA="1")
    child = subprocess.run(
        [sys.executable, __file__, "--child", "--size", str(args.size), "--repeat", str(args.repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    slow = json.loads(child.stdout)
    assert not slow["use_numba"]

    print(f"{'kernel':40s} {'numba (s)':>10s} {'numpy (s)':>10s} {'speedup':>8s}")
    tolerances = {name: c[2] for name, c in cases(args.size).items()}
    for name, f in fast.items():
        s = slow["timings"][name]
        assert np.isclose(f["checksum"], s["checksum"], rtol=tolerances[name]), f"{name}: paths disagree"
        print(f"{name:40s} {f['seconds']:10.4f} {s['seconds']:10.4f} {s['seconds'] / f['seconds']:7.1f}x")


if __name__ == "__main__":
    main()
