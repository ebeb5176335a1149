import numpy as np
import pytest

from subgrad_newton.geometry import ConeUnion, Polyhedron

ACCEPTANCE_RESULTS = {}


def record_acceptance(number, ok, detail=""):
    """Store the verdict of one acceptance criterion for the summary lines."""
    ACCEPTANCE_RESULTS[number] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def cone(dim, A_ub=None, A_eq=None):
    return Polyhedron(dim, A_ub=A_ub, A_eq=A_eq)


def cone_union(dim, *pieces):
    return ConeUnion(dim, list(pieces))
