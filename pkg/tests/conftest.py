import random
from fractions import Fraction

import pytest

from walshform.stepfun import StepFun2D

ACCEPTANCE_LINES: list[str] = []


def rand_grid(M, rng, lo=-8, hi=8, dens=(1, 2, 4)):
    return StepFun2D.from_function(
        M, lambda x, y: Fraction(rng.randint(lo, hi), rng.choice(dens)) if rng.random() > 0.2 else 0
    )


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
