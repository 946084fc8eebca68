import numpy as np
import pytest

from isocloak.params import CloakGeometry


@pytest.fixture
def geom():
    return CloakGeometry(0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
