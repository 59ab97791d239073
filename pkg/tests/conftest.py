import numpy as np
import pytest

from orbconv import build_space


@pytest.fixture(scope="session")
def h2():
    return build_space("real-hyperbolic", [2])


@pytest.fixture(scope="session")
def h3():
    return build_space("real-hyperbolic", [3])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import pytest_terminal_summary_lines
    except ImportError:
        return
    lines = pytest_terminal_summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
