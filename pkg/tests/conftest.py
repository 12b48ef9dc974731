from importlib.resources import files

import pytest

from paflow import hamiltonian, hyperbolic, pa, tracks

DATA = files("paflow") / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def track():
    return tracks.load_track(DATA / "genus2_track.json")


@pytest.fixture(scope="session")
def space(track):
    return tracks.weight_space(track)


@pytest.fixture(scope="session")
def example():
    return pa.shipped_example()


@pytest.fixture(scope="session")
def potential(example):
    return hamiltonian.build_potential(example)


@pytest.fixture(scope="session")
def torus():
    return hyperbolic.build_punctured_torus(3.0, 3.0)


@pytest.fixture(scope="session")
def genus2():
    return hyperbolic.build_genus2_fn((1.5, 1.8, 2.2), (0.3, -0.2, 0.4))


_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def acceptance_lines():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for c in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[c])
