"""Exact linear programming: two-phase tableau simplex with Bland's rule.

All arithmetic is in ``Fraction``; Bland's anti-cycling rule guarantees
termination, so there are no tolerances and no iteration caps.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: list[Fraction] | None = None
    objective: Fraction | None = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _pivot(t: list[list[Fraction]], cost: list[Fraction], r: int, c: int) -> None:
    row = t[r]
    inv = 1 / row[c]
    if inv != 1:
        row = t[r] = [x * inv for x in row]
    nz = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(t):
        if i != r:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]
    f = cost[c]
    if f:
        for j in nz:
            cost[j] -= f * row[j]


def _run(t, cost, basis, allowed: int) -> bool:
    """Minimize the tableau's objective in place. Returns False if unbounded."""
    rhs = len(t[0]) - 1 if t else 0
    while True:
        c = next((j for j in range(allowed) if cost[j] < 0), None)
        if c is None:
            return True
        best = None
        for i, row in enumerate(t):
            a = row[c]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        r = best[1]
        _pivot(t, cost, r, c)
        basis[r] = c


def simplex_standard(c: Sequence, a: Sequence[Sequence], b: Sequence) -> LPResult:
    """minimize c.x subject to a x = b, x >= 0."""
    n = len(c)
    m = len(a)
    c = [Fraction(x) for x in c]
    t: list[list[Fraction]] = []
    for row, rhs in zip(a, b):
        row = [Fraction(x) for x in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row, rhs = [-x for x in row], -rhs
        t.append(row + [Fraction(0)] * m + [rhs])
    for i in range(m):
        t[i][n + i] = Fraction(1)
    basis = [n + i for i in range(m)]

    # phase 1: minimize the sum of artificials
    cost = [Fraction(0)] * (n + m + 1)
    for j in range(n + m + 1):
        if not (n <= j < n + m):
            cost[j] = -sum((row[j] for row in t), Fraction(0))
    _run(t, cost, basis, n + m)
    if cost[-1] != 0:
        return LPResult(INFEASIBLE)

    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(t):
        if basis[i] >= n:
            j = next((j for j in range(n) if t[i][j] != 0), None)
            if j is None:
                del t[i]
                del basis[i]
                continue
            _pivot(t, cost, i, j)
            basis[i] = j
        i += 1
    t = [row[:n] + [row[-1]] for row in t]

    cost = c + [Fraction(0)]
    for i, bj in enumerate(basis):
        f = cost[bj]
        if f:
            cost = [x - f * y for x, y in zip(cost, t[i])]
    if not _run(t, cost, basis, n):
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, bj in enumerate(basis):
        x[bj] = t[i][-1]
    return LPResult(OPTIMAL, x, sum((ci * xi for ci, xi in zip(c, x)), Fraction(0)))


def linprog(
    c: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Iterable[int] = (),
    maximize: bool = False,
) -> LPResult:
    """General-form exact LP.

    Variables are nonnegative unless listed in ``free``. Inequalities read
    ``a_ub @ x <= b_ub``.
    """
    n = len(c)
    free = sorted(set(free))
    sign = -1 if maximize else 1
    # column layout: original vars, negative parts of free vars, slacks
    n_free = len(free)
    n_slack = len(a_ub)
    width = n + n_free + n_slack

    def expand(row):
        row = [Fraction(x) for x in row]
        return row + [-row[j] for j in free]

    rows, rhs = [], []
    for k, (row, bk) in enumerate(zip(a_ub, b_ub)):
        r = expand(row) + [Fraction(0)] * n_slack
        r[n + n_free + k] = Fraction(1)
        rows.append(r)
        rhs.append(bk)
    for row, bk in zip(a_eq, b_eq):
        rows.append(expand(row) + [Fraction(0)] * n_slack)
        rhs.append(bk)
    cc = [sign * Fraction(x) for x in c]
    cc = cc + [-cc[j] for j in free] + [Fraction(0)] * n_slack
    if not rows:
        rows, rhs = [[Fraction(0)] * width], [Fraction(0)]
    res = simplex_standard(cc, rows, rhs)
    if not res.ok:
        return res
    x = res.x[:n]
    for k, j in enumerate(free):
        x[j] -= res.x[n + k]
    return LPResult(OPTIMAL, x, sign * res.objective)
