import pytest

from rrlab.constants import natural_units
from rrlab.dynamics import solve_trajectory
from rrlab.potential import PotentialSpec
from rrlab.shift import shift_report
from rrlab.spectral import fourier_acceleration

P_BAR = 0.1
Z0 = 5.0
V_STD = 5e-4
LADDER = (4e-3, 2e-3, 1e-3, 5e-4)


@pytest.fixture(scope="session")
def consts():
    return natural_units()


@pytest.fixture(scope="session")
def ramp():
    return PotentialSpec(v_minus_inf=V_STD, half_width=1.0)


@pytest.fixture(scope="session")
def traj(consts, ramp):
    return solve_trajectory(consts, ramp, P_BAR, Z0)


@pytest.fixture(scope="session")
def spectrum(traj):
    return fourier_acceleration(traj)


@pytest.fixture(scope="session")
def report(consts, traj, spectrum):
    return shift_report(consts, traj, spectrum)


@pytest.fixture(scope="session")
def free_traj(consts):
    return solve_trajectory(consts, PotentialSpec(), P_BAR, Z0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
