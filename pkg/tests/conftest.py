import numpy as np
import pytest

from opmeans.measure import DiscreteMeasure


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def scalar_measure(values, weights=None):
    return DiscreteMeasure([np.array([[float(v)]]) for v in values], weights)


@pytest.fixture
def half_one_nine():
    return scalar_measure([1.0, 9.0])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
