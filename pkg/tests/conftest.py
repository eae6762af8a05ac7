import json
from pathlib import Path

import numpy as np
import pytest

from hodgeheat.generators import fixtures, random_complexes, torus

DATA = Path(__file__).parent / "data"
RANDOM_SEED = 20240611
RANDOM_COUNT = 50

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def oracle():
    return json.loads((DATA / "oracles.json").read_text())


@pytest.fixture(scope="session")
def fixture_complexes():
    return fixtures()


@pytest.fixture(scope="session")
def random_cxs():
    return random_complexes(RANDOM_SEED, RANDOM_COUNT, max_simplices=60, max_dim=3)


@pytest.fixture(scope="session")
def torus_cx():
    return torus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    """Record the one-line verdict for an acceptance criterion."""

    def record(number: int, name: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES[number] = f"[{status}] criterion {number:2d} {name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
