import sys
import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def disk_points(max_radius=0.95):
    """Hypothesis strategy for complex points with ``|z| <= max_radius``."""
    return st.builds(lambda r, t: max_radius * np.sqrt(r) * np.exp(2j * np.pi * t),
                     st.floats(0, 1), st.floats(0, 1))


def mobius_params(max_radius=0.9):
    return st.tuples(disk_points(max_radius), st.floats(-np.pi, np.pi))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
