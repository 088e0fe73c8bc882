import numpy as np
import pytest
from hypothesis import strategies as st

from biqutrit.moments import QutritState, random_mixed, random_pure


@pytest.fixture
def rng():
    return np.random.default_rng(20040101)


@pytest.fixture
def pure_states(rng):
    return [random_pure(rng) for _ in range(100)]


@pytest.fixture
def mixed_states(rng):
    return [random_mixed(rng) for _ in range(100)]


_component = st.floats(-1, 1, allow_nan=False)


@st.composite
def amplitude_vectors(draw):
    c = np.array([complex(draw(_component), draw(_component)) for _ in range(3)])
    norm = np.linalg.norm(c)
    if norm < 1e-3:
        c = np.array([0, 0, 1], dtype=complex)
        norm = 1.0
    return c / norm


@st.composite
def pure_qutrits(draw):
    return QutritState.from_amplitudes(draw(amplitude_vectors()))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
