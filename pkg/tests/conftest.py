from pathlib import Path

import pytest

from resonancelab.potential import Gaussian, GaussianSum, SquareWell

SPECS = Path(__file__).resolve().parent.parent / "demos" / "specs"

# one PASS/FAIL line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: dict = {}


@pytest.fixture(scope="session")
def gauss():
    return Gaussian(1.0, 1.0, 0.0)


@pytest.fixture(scope="session")
def well():
    return SquareWell(-2.0, 1.0)


@pytest.fixture(scope="session")
def zero():
    return Gaussian(0.0)


@pytest.fixture(scope="session")
def two_gauss():
    return GaussianSum((Gaussian(1.0, 1.0, -0.5), Gaussian(-0.6, 0.7, 0.8)))


@pytest.fixture(scope="session")
def spec_dir():
    return SPECS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
