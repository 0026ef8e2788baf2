import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def random_spinor(rng, k, n=None):
    shape = (k,) if n is None else (n, k)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
