import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog as scipy_linprog

from curlset.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog, simplex_standard


def test_small_optimum():
    # max x + y, x + 2y <= 4, 3x + y <= 6
    res = linprog([1, 1], [[1, 2], [3, 1]], [4, 6], maximize=True)
    assert res.status == OPTIMAL
    assert res.objective == Fraction(14, 5)
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]


def test_infeasible_and_unbounded():
    assert linprog([1], [[1]], [-1]).status == INFEASIBLE
    assert linprog([1], [[-1]], [0], maximize=True).status == UNBOUNDED


def test_free_variables():
    res = linprog([1], [[-1]], [3], free=[0])
    assert res.objective == -3 and res.x == [-3]


def test_degenerate_redundant_equalities():
    res = simplex_standard([1, 1, 0], [[1, 1, 1], [2, 2, 2]], [1, 2])
    assert res.status == OPTIMAL and res.objective == 0


@pytest.mark.parametrize("seed", range(40))
def test_against_highs(seed):
    rng = random.Random(seed)
    n, m, k = rng.randint(1, 5), rng.randint(0, 5), rng.randint(0, 2)
    c = [rng.randint(-4, 4) for _ in range(n)]
    a_ub = [[rng.randint(-4, 4) for _ in range(n)] for _ in range(m)]
    b_ub = [rng.randint(-3, 6) for _ in range(m)]
    a_eq = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(k)]
    b_eq = [rng.randint(-3, 3) for _ in range(k)]
    ours = linprog(c, a_ub, b_ub, a_eq, b_eq)
    ref = scipy_linprog(
        c, A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq or None, b_eq=b_eq or None, method="highs"
    )
    expected = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}[ref.status]
    assert ours.status == expected
    if expected == OPTIMAL:
        assert float(ours.objective) == pytest.approx(ref.fun, abs=1e-9)
        x = ours.x
        assert all(xi >= 0 for xi in x)
        assert all(sum(a * xi for a, xi in zip(row, x)) <= b for row, b in zip(a_ub, b_ub))
        assert all(sum(a * xi for a, xi in zip(row, x)) == b for row, b in zip(a_eq, b_eq))
