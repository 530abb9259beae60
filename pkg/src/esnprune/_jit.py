"""Optional numba acceleration.

Kernels are written so the same source runs under ``numba.njit`` and as
plain numpy.  Set ``ESNPRUNE_DISABLE_NUMBA=1`` to force the numpy path.
"""

import os

DISABLE_ENV = "ESNPRUNE_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = numba is not None and not _disabled_by_env()


def njit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged.

    The original function is always reachable as ``.py_func`` so callers
    (benchmarks, tests) can exercise both paths in one process.
    """
    if USE_NUMBA:
        return numba.njit(cache=True)(func)
    func.py_func = func
    return func
