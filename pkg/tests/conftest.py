import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from angmax import make_simple

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def simple_functions(draw, max_pieces=5, nonnegative=False, complex_values=False, lo=0.0, hi=5.0):
    n = draw(st.integers(1, max_pieces))
    gaps = draw(st.lists(st.floats(0.05, 1.5), min_size=n, max_size=n))
    start = draw(st.floats(lo, hi))
    bps = start + np.concatenate([[0.0], np.cumsum(gaps)])
    vlo = 0.0 if nonnegative else -2.0
    vals = np.array(draw(st.lists(st.floats(vlo, 2.0), min_size=n, max_size=n)), dtype=complex)
    if complex_values:
        vals = vals + 1j * np.array(draw(st.lists(st.floats(-2.0, 2.0), min_size=n, max_size=n)))
    return make_simple(bps, vals)


def random_simple(rng, max_pieces=5, nonnegative=False, complex_values=False):
    n = int(rng.integers(1, max_pieces + 1))
    bps = np.cumsum(np.concatenate([[rng.uniform(0, 3)], rng.uniform(0.05, 1.5, n)]))
    vals = rng.uniform(0 if nonnegative else -2, 2, n).astype(complex)
    if complex_values:
        vals = vals + 1j * rng.uniform(-2, 2, n)
    return make_simple(bps, vals)


@pytest.fixture
def chi01():
    return make_simple([0.0, 1.0], [1.0])


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
