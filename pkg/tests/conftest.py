import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qhj.model import EnergySlice, PotentialModel

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ho():
    return PotentialModel.oscillator()


@pytest.fixture(scope="session")
def quartic():
    # V = x^4 with 2m = 1
    return PotentialModel.quartic(lam=1.0, m=0.5)


def level_slice(model, n):
    return EnergySlice.at(model, model.hbar * model.omega * (n + 0.5))


def region_grid(sl, points):
    return np.linspace(sl.x1, sl.x2, points)


# acceptance lines collected by test_acceptance.py and echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
