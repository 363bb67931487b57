import random
from fractions import Fraction

import pytest

from curlset.builder import LiftedPoint, build_gauge, build_line_solution
from curlset.catalog import line_set
from curlset.exterior import KForm, eform, vector, wedge
from curlset.mesh import Box, BoxDomain, Cell, PAField
from curlset.polytope import HPolytope, halfspace
from curlset.setlab import FormSet
from curlset.verifier import (
    VerificationReport,
    Violation,
    cell_curl,
    check_continuity,
    check_membership,
    integrate_field,
    measure_by_element,
    verify,
)

F = Fraction


def box_poly(lo, hi):
    n = len(lo)
    hs = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        hs.append(halfspace(e, hi[j]))
        hs.append(halfspace([-x for x in e], -lo[j]))
    return HPolytope(n, tuple(hs))


def cell(poly, matrix, offset):
    return Cell(poly, tuple(tuple(F(x) for x in r) for r in matrix), tuple(F(x) for x in offset))


def square_field():
    sq = build_gauge([LiftedPoint(i, v, F(0)) for i, v in enumerate([(1, 0), (-1, 0), (0, 1), (0, -1)])], (1, 0))
    cells = sq.field()
    dom = BoxDomain((Box((-1, -1), (1, 1)),))
    return PAField(2, cells, dom, F(4))


def test_cell_curl_examples():
    # eta = (1 + v.x) b with v = e2 + 2e1, b = e1: eta_1 = 1 + 2x1 + x2
    assert cell_curl([[2, 1, 0], [0, 0, 0], [0, 0, 0]]) == -eform(3, 1, 2)
    assert cell_curl([[0, 0], [1, 0]]) == eform(2, 1, 2)
    assert cell_curl([[1, 0], [0, 1]]).is_zero()
    with pytest.raises(ValueError):
        cell_curl([[1, 2]])


def test_cell_curl_matches_wedge():
    # A = b v^T has curl v ^ b
    v, b = vector(3, -1, 2), vector(0, 1, 5)
    assert cell_curl([[bi * vj for vj in v] for bi in b]) == wedge(v, b)


def test_cell_curl_antisymmetric():
    rng = random.Random(7)
    for _ in range(500):
        n = rng.randint(2, 5)
        a = [[F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        at = [list(r) for r in zip(*a)]
        assert (cell_curl(a) + cell_curl(at)).is_zero()


def test_curl_outside_set_fails():
    # a cell whose curl is e13 audited against E = {e12}
    mesh = PAField(3, [cell(box_poly((0, 0, 0), (1, 1, 1)), [[0, 0, 0], [0, 0, 0], [1, 0, 0]], [0, 0, 0])],
                   BoxDomain.unit_cube(3), F(1))
    rep = verify(mesh, FormSet(3, (eform(3, 1, 2),)))
    assert not rep.passed and Violation.CURL in rep.violations
    assert rep.per_cell_curl == [(0, eform(3, 1, 3), None)]


def test_empty_mesh():
    E = FormSet(3, (eform(3, 1, 2),))
    mesh = PAField(3, [], BoxDomain.unit_cube(3), F(0))
    assert check_membership(mesh, E) == []
    rep = verify(mesh, E)
    assert rep.violations == [Violation.MEASURE]
    assert rep.integral == (0, 0, 0)


def test_dimension_mismatch():
    mesh = PAField(2, [], BoxDomain.unit_cube(2), F(0))
    rep = verify(mesh, line_set(3))
    assert rep.violations == [Violation.DIMENSION]


def test_square_gauge_passes():
    mesh = square_field()
    zero = KForm.zero(2, 2)
    E = FormSet(2, (eform(2, 1, 2), -eform(2, 1, 2), zero))
    rep = verify(mesh, E, require_nonzero_integral=True)
    assert rep.passed, rep.reasons
    assert rep.measures == [1, 1, 2]
    assert rep.covered_volume == 4
    assert measure_by_element(mesh, E) == [1, 1, 2]


def test_sawtooth_continuity():
    # eta_1 = x1 on [0,1]x[0,1], 2 - x1 on [1,2]x[0,1]
    left = cell(box_poly((0, 0), (1, 1)), [[1, 0], [0, 0]], [0, 0])
    right = cell(box_poly((1, 0), (2, 1)), [[-1, 0], [0, 0]], [2, 0])
    dom = BoxDomain((Box((0, 0), (2, 1)),))
    ok, pairs, boundary = check_continuity(PAField(2, [left, right], dom, F(2)))
    assert pairs == []
    # the horizontal sides carry nonzero values
    assert boundary == [0, 1]
    bumped = cell(right.poly, right.matrix, (F(2) + F(1, 1000), F(0)))
    ok, pairs, _ = check_continuity(PAField(2, [left, bumped], dom, F(2)))
    assert not ok and pairs == [(0, 1)]


def test_shifted_field_fails_boundary():
    mesh = square_field()
    E = FormSet(2, (eform(2, 1, 2), -eform(2, 1, 2), KForm.zero(2, 2)))
    shifted = [Cell(c.poly, c.matrix, tuple(x + 1 for x in c.offset)) for c in mesh.cells]
    rep = verify(PAField(2, shifted, mesh.domain, F(4)), E)
    assert rep.violations == [Violation.BOUNDARY]
    assert rep.continuity_ok and not rep.boundary_ok


def test_constant_field_integral():
    mesh = PAField(3, [cell(box_poly((0, 0, 0), (2, 1, 1)), [[0] * 3] * 3, [1, -2, F(1, 3)])],
                   BoxDomain((Box((0, 0, 0), (2, 1, 1)),)), F(2))
    assert integrate_field(mesh) == (2, -4, F(2, 3))


def test_overlap_and_containment():
    a = cell(box_poly((0, 0), (1, 1)), [[0, 0], [0, 0]], [0, 0])
    b = cell(box_poly((F(1, 2), 0), (F(3, 2), 1)), [[0, 0], [0, 0]], [0, 0])
    dom = BoxDomain((Box((0, 0), (1, 1)),))
    E = FormSet(2, (KForm.zero(2, 2),))
    rep = verify(PAField(2, [a, b], dom, F(2)), E)
    assert rep.overlaps == [(0, 1)]
    assert rep.outside_domain == [1]
    assert Violation.OVERLAP in rep.violations and Violation.CONTAINMENT in rep.violations
    # a cell only touching another along a facet is not an overlap
    c = cell(box_poly((1, 0), (2, 1)), [[0, 0], [0, 0]], [0, 0])
    rep = verify(PAField(2, [a, c], BoxDomain((Box((0, 0), (2, 1)),)), F(2)), E)
    assert rep.overlaps == [] and rep.passed


def test_unbounded_and_degenerate_cells():
    E = FormSet(2, (KForm.zero(2, 2),))
    half = HPolytope(2, (halfspace((1, 0), 1), halfspace((-1, 0), 0), halfspace((0, 1), 1)))
    flat = box_poly((0, 0), (1, 0))
    good = cell(box_poly((0, 0), (1, 1)), [[0, 0], [0, 0]], [0, 0])
    mesh = PAField(2, [cell(half, [[0, 0], [0, 0]], [0, 0]), cell(flat, [[0, 0], [0, 0]], [0, 0]), good],
                   BoxDomain.unit_cube(2), F(1))
    rep = verify(mesh, E)
    assert Violation.UNBOUNDED in rep.violations
    assert any("zero-volume" in s for s in rep.notes)


def test_declared_volume_checked():
    mesh = square_field()
    E = FormSet(2, (eform(2, 1, 2), -eform(2, 1, 2), KForm.zero(2, 2)))
    rep = verify(PAField(2, mesh.cells, mesh.domain, F(3)), E)
    assert rep.violations == [Violation.COVERED_VOLUME]


def test_report_roundtrip():
    E = line_set(3)
    sol = build_line_solution(E, epsilon=F(1, 2))
    rep = verify(sol.field, E)
    assert rep.passed
    again = VerificationReport.from_json(rep.to_json())
    assert again == rep
    assert again.to_json() == rep.to_json()


def test_mesh_json_roundtrip_verifies():
    E = line_set(3)
    sol = build_line_solution(E, epsilon=F(1, 3))
    mesh = PAField.from_json(sol.field.to_json())
    assert verify(mesh, E).passed
