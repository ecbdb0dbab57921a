import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pentrans.diagram import PersistenceDiagram

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def finite_diagrams(draw, degree=0, min_size=0, max_size=12):
    """Diagrams with finite bars on a coarse grid, so ties are common."""
    n = draw(st.integers(min_size, max_size))
    births = draw(st.lists(st.integers(0, 20), min_size=n, max_size=n))
    lengths = draw(st.lists(st.integers(0, 20), min_size=n, max_size=n))
    bars = [(b / 4, (b + ell) / 4) for b, ell in zip(births, lengths)]
    return PersistenceDiagram(degree, bars)


@st.composite
def point_clouds(draw, min_n=1, max_n=8, max_dim=3):
    n = draw(st.integers(min_n, max_n))
    dim = draw(st.integers(1, max_dim))
    coords = draw(st.lists(st.integers(-6, 6), min_size=n * dim, max_size=n * dim))
    return np.array(coords, dtype=float).reshape(n, dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
