"""Exact linear algebra over the rationals.

Matrices are lists of rows; entries are anything ``Fraction`` accepts.
Nothing here ever rounds.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Matrix = list[list[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = to_matrix(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence]) -> int:
    if not rows or not len(rows[0]):
        return 0
    return len(rref(rows)[1])


def row_space(rows: Sequence[Sequence]) -> Matrix:
    """A basis of the row space (the nonzero rows of the RREF)."""
    if not rows:
        return []
    m, piv = rref(rows)
    return m[: len(piv)]


def nullspace(rows: Sequence[Sequence], n_cols: int | None = None) -> Matrix:
    """Basis of {x : rows @ x = 0}."""
    if not rows:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [[Fraction(int(i == j)) for j in range(n_cols)] for i in range(n_cols)]
    m, piv = rref(rows)
    n_cols = len(m[0])
    free = [c for c in range(n_cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -m[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """One solution of a @ x = b, or None when inconsistent. Free variables are set to 0."""
    n_cols = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, piv = rref(aug)
    if n_cols in piv:
        return None
    x = [Fraction(0)] * n_cols
    for r, pc in enumerate(piv):
        x[pc] = m[r][n_cols]
    return x


def det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free (Bareiss) elimination on an integer rescaling."""
    m = to_matrix(rows)
    n = len(m)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    ints = []
    for row in m:
        d = lcm(*(x.denominator for x in row))
        scale /= d
        ints.append([int(x * d) for x in row])
    return scale * det_int(ints)


def det_int(a: list[list[int]]) -> int:
    a = [row[:] for row in a]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank_int(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r, prev = 0, 1
    for c in range(n_cols):
        p = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pk = m[r][c]
        for i in range(r + 1, n_rows):
            f = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, n_cols):
                row_i[j] = (row_i[j] * pk - f * row_r[j]) // prev
            row_i[c] = 0
        prev = pk
        r += 1
        if r == n_rows:
            break
    return r


def solve_square_int(a: list[list[int]], b: list[int]) -> tuple[list[int], int] | None:
    """Solve a square integer system; returns (numerators, common denominator > 0) or None if singular.

    Fraction-free Gauss-Jordan; the hot path of vertex enumeration.
    """
    n = len(a)
    m = [row[:] + [rhs] for row, rhs in zip(a, b)]
    prev = 1
    for k in range(n):
        if m[k][k] == 0:
            p = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if p is None:
                return None
            m[k], m[p] = m[p], m[k]
        pk = m[k][k]
        for i in range(n):
            if i == k:
                continue
            mik = m[i][k]
            row_i, row_k = m[i], m[k]
            for j in range(n + 1):
                if j != k:
                    row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
            row_i[k] = 0
        prev = pk
    # after full elimination every diagonal entry equals the determinant
    d = m[n - 1][n - 1]
    nums = [m[i][n] for i in range(n)]
    if d < 0:
        d, nums = -d, [-x for x in nums]
    return nums, d


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def mat_vec(a: Sequence[Sequence], v: Sequence) -> list[Fraction]:
    return [dot(row, v) for row in a]


def intersect_subspaces(*bases: Sequence[Sequence], n: int) -> Matrix:
    """Basis of the intersection of row-spanned subspaces of Q^n."""
    # x lies in span(B) iff x is orthogonal to null(B); intersect by stacking complements
    constraints: list[list[Fraction]] = []
    for b in bases:
        if not b:
            return []
        constraints.extend(nullspace(b))
    if not constraints:
        return nullspace([], n_cols=n)
    return nullspace(constraints)
