import numpy as np
import pytest

from ofdmcfo import OfdmParams, PilotGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def params():
    return OfdmParams(n=64, cp_len=16, l_symbols=8)


@pytest.fixture
def geometry():
    return PilotGeometry(delta_t=8, n_p=8, pattern="rectangular", x1=4, y2=8)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
