import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def stochastic_matrices(draw, rows=(2, 4), cols=(2, 4), positive=True):
    n = draw(st.integers(*rows))
    m = draw(st.integers(*cols))
    lo = 0.05 if positive else 0.0
    vals = draw(st.lists(st.floats(lo, 1.0), min_size=n * m, max_size=n * m))
    A = np.array(vals).reshape(n, m)
    A[A.sum(axis=1) == 0, 0] = 1.0
    return A / A.sum(axis=1, keepdims=True)


@st.composite
def tp2_matrices(draw, rows=(2, 4), cols=(2, 4)):
    """Exponential-family rows p(y|x) ~ h(y) exp(theta_x y) with increasing theta are TP2."""
    n = draw(st.integers(*rows))
    m = draw(st.integers(*cols))
    steps = draw(st.lists(st.floats(0.0, 2.0), min_size=n, max_size=n))
    theta = np.cumsum(steps)
    h = np.array(draw(st.lists(st.floats(0.1, 1.0), min_size=m, max_size=m)))
    A = h[None, :] * np.exp(np.outer(theta, np.arange(m)))
    return A / A.sum(axis=1, keepdims=True)


@st.composite
def beliefs(draw, n):
    w = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n)))
    return w / w.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
