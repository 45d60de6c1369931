import os
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from owasched import make_instance, Objective
from owasched.testkit import CnfFormula, gen_tight_ratio

settings.register_profile(
    "default", max_examples=int(os.environ.get("OWASCHED_EXAMPLES", 60)), deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# 3-literal formula with five clauses over four variables, and its due-date
# scenario matrix (rows J_x1, J_~x1, ..., J_x4, J_~x4; columns S_1..S_5)
DUEDATE_FORMULA = CnfFormula(4, ((1, -2, -3), (-2, -3, 4), (-1, 2, -4), (1, 2, 3), (1, 3, -4)))
DUEDATE_MATRIX = [
    [1, 2, 2, 1, 1],
    [2, 2, 1, 2, 2],
    [4, 4, 3, 3, 4],
    [3, 3, 4, 4, 4],
    [6, 6, 6, 5, 5],
    [5, 5, 6, 6, 6],
    [8, 7, 8, 8, 8],
    [8, 8, 7, 8, 7],
]

# 2-literal formula and its (p, w) pairs per job and scenario
WCT_FORMULA = CnfFormula(4, ((1, -2), (-2, -3), (-1, -4), (1, 3), (1, -4)))
WCT_PAIRS = [
    [(0, 1), (0, 0), (1, 0), (0, 1), (0, 1)],
    [(1, 0), (0, 0), (0, 1), (1, 0), (1, 0)],
    [(1, 0), (1, 0), (0, 0), (0, 0), (0, 0)],
    [(0, 1), (0, 1), (0, 0), (0, 0), (0, 0)],
    [(0, 0), (1, 0), (0, 0), (0, 1), (0, 0)],
    [(0, 0), (0, 1), (0, 0), (1, 0), (0, 0)],
    [(0, 0), (0, 0), (1, 0), (0, 0), (1, 0)],
    [(0, 0), (0, 0), (0, 1), (0, 0), (0, 1)],
]


@pytest.fixture
def tight2():
    """Four unit jobs, due dates (1,2,3,4) and (1,1,3,3)."""
    return gen_tight_ratio(2)


@pytest.fixture
def wct_small():
    return make_instance([[1], [2]], None, [[3], [4]], (), Objective.WEIGHTED_COMPLETION_SUM)


F = Fraction


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
