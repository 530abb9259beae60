import numpy as np
import pytest

from esnprune.data import MackeyGlassParams, mackey_glass, make_splits


@pytest.fixture(scope="session")
def mg_short():
    """2000-sample Mackey-Glass series with default split fractions."""
    return mackey_glass(MackeyGlassParams(n_samples=2000))


@pytest.fixture(scope="session")
def mg_full():
    return mackey_glass()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        def order(line):
            label = line.split("criterion")[1].split(":")[0].strip()
            return (0, int(label)) if label.isdigit() else (1, 0)

        for line in sorted(lines, key=order):
            terminalreporter.write_line(line)
