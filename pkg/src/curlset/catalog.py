"""Named instances used in demos, tests and the acceptance suite."""
from __future__ import annotations

from .exterior import eform
from .setlab import FormSet


def line_set(n: int, line: int = 1) -> FormSet:
    """{+-e^line ^ e^j : j != line}, contained in R^n ^ e^line."""
    els = []
    for j in range(1, n + 1):
        if j != line:
            e = eform(n, line, j) if line < j else -eform(n, j, line)
            els += [e, -e]
    return FormSet(n, tuple(els))


def three_plane_set(n: int = 4) -> FormSet:
    """{e12, e13, e23}: pairwise zero wedges, span 3, but no common line."""
    return FormSet(n, (eform(n, 1, 2), eform(n, 1, 3), eform(n, 2, 3)))


def shifted_fan_set(n: int = 5) -> FormSet:
    """{e23} plus {e23 + e1j : j = 2..n-1}; rank differences <= 2, wedges not all zero."""
    base = eform(n, 2, 3)
    return FormSet(n, (base,) + tuple(base + eform(n, 1, j) for j in range(2, n)))


def full_span_set() -> FormSet:
    """{e12, e13, e14, e23} in R^4, spanning a 4-dimensional subspace."""
    return FormSet(4, (eform(4, 1, 2), eform(4, 1, 3), eform(4, 1, 4), eform(4, 2, 3)))


def two_line_set(n: int = 4) -> tuple[FormSet, tuple[tuple[int, ...], tuple[int, ...]]]:
    """E = E1 cup E2 with span E = R^n^e1 + R^n^e2 (dimension 2n-3), and the cover (E1, E2).

    E1 = {+-e1^ej : j >= 2} and E2 = {+-e2^ej : j != 2}; the two share +-e1^e2.
    """
    ones = [eform(n, 1, j) for j in range(2, n + 1)]
    twos = [eform(n, 2, j) for j in range(3, n + 1)]
    els = tuple(ones + [-e for e in ones] + twos + [-e for e in twos])
    E = FormSet(n, els)
    m = n - 1
    part1 = tuple(range(2 * m))
    part2 = (0, m) + tuple(range(2 * m, len(els)))
    return E, (part1, part2)
