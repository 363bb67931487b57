"""Deliberate mesh corruptions for the verifier soundness checks."""
from __future__ import annotations

from fractions import Fraction

from curlset.mesh import Cell, PAField


def _replace(mesh: PAField, i: int, cell: Cell) -> PAField:
    cells = list(mesh.cells)
    cells[i] = cell
    return PAField(mesh.n, cells, mesh.domain, mesh.covered_volume)


def _value(cell: Cell, x):
    return [sum(a * y for a, y in zip(row, x)) + c for row, c in zip(cell.matrix, cell.offset)]


def break_continuity(mesh: PAField, i: int, lam=Fraction(1, 3)) -> PAField:
    """Add lam * (g.x - c) g, which vanishes on the facet where the cell's map vanishes.

    The curl is unchanged (g g^T is symmetric) and the outer facet still
    carries zero, so only the shared facets disagree.
    """
    cell = mesh.cells[i]
    poly = cell.poly
    for (g, c), s in poly.facets:
        if all(not any(_value(cell, poly.vertices[j])) for j in s):
            break
    else:
        raise ValueError("cell has no facet where its map vanishes")
    matrix = tuple(tuple(a + lam * gi * gj for a, gj in zip(row, g)) for row, gi in zip(cell.matrix, g))
    offset = tuple(o - lam * c * gi for o, gi in zip(cell.offset, g))
    return _replace(mesh, i, Cell(poly, matrix, offset))


def wrong_curl(mesh: PAField, i: int, factor=2) -> PAField:
    cell = mesh.cells[i]
    matrix = tuple(tuple(factor * a for a in row) for row in cell.matrix)
    return _replace(mesh, i, Cell(cell.poly, matrix, tuple(factor * o for o in cell.offset)))


def shift_everything(mesh: PAField, c) -> PAField:
    """eta + c on every cell: still continuous inside, nonzero on the outer boundary."""
    c = [Fraction(x) for x in c]
    cells = [Cell(k.poly, k.matrix, tuple(o + d for o, d in zip(k.offset, c))) for k in mesh.cells]
    return PAField(mesh.n, cells, mesh.domain, mesh.covered_volume)
