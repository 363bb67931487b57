import random
import sys
from fractions import Fraction
from math import comb
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from curlset.exterior import KForm  # noqa: E402


def random_form(rng: random.Random, n: int, k: int, lo: int = -3, hi: int = 3, den: int = 1) -> KForm:
    return KForm(n, k, tuple(Fraction(rng.randint(lo, hi), rng.randint(1, den)) for _ in range(comb(n, k))))


def random_vector(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> tuple:
    return tuple(Fraction(rng.randint(lo, hi)) for _ in range(n))


@pytest.fixture
def rng():
    return random.Random(20240405)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
