import numpy as np
import pytest

from qgalois import examples as ex

# acceptance lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def groups():
    return {name: ex.group(name) for name in ("Z2", "Z3", "S3")}


@pytest.fixture(scope="session")
def crossed(groups):
    return {name: ex.crossed_product(G) for name, G in groups.items()}


@pytest.fixture(scope="session")
def pauli():
    return ex.projective_cocycle_algebra(ex.heisenberg_cocycle(2))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)
