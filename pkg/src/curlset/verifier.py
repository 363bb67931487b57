"""Bit-exact audit of a piecewise-affine mesh against a set E of 2-forms.

Works from the mesh alone. Each cell's vertices, facets and volume are
recomputed from its halfspaces. Facets are matched across cells by plane and
vertex set; a matched pair must carry the same affine values at the facet
vertices, an unmatched facet must carry zero (the field extends by zero).
Cell interiors must be pairwise disjoint and inside one domain box.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import floor, lcm, prod
from typing import Sequence

from .exterior import KForm
from .mesh import PAField
from .polytope import HPolytope, interiors_intersect, origin_in_interior
from .rational import format_rational, format_vector, parse_rational, parse_vector
from .setlab import FormSet


class Violation(str, enum.Enum):
    CURL = "curl"
    CONTINUITY = "continuity"
    BOUNDARY = "boundary"
    MEASURE = "measure"
    OVERLAP = "overlap"
    CONTAINMENT = "containment"
    UNBOUNDED = "unbounded"
    COVERED_VOLUME = "covered_volume"
    INTEGRAL = "integral"
    DIMENSION = "dimension"


def cell_curl(matrix: Sequence[Sequence], n: int | None = None) -> KForm:
    """curl_ij = dA_j/dx_i - dA_i/dx_j = A[j][i] - A[i][j] for i < j."""
    n = len(matrix) if n is None else n
    if len(matrix) != n or any(len(r) != n for r in matrix):
        raise ValueError("matrix is not n x n")
    return KForm(n, 2, tuple(Fraction(matrix[j][i]) - Fraction(matrix[i][j]) for i, j in combinations(range(n), 2)))


def _plane_key(g, c) -> tuple[tuple, int]:
    g, c = [Fraction(x) for x in g], Fraction(c)
    lead = next(x for x in g if x != 0)
    s = abs(lead)
    return (tuple(x / s for x in g) + (c / s,)) if lead > 0 else (tuple(-x / s for x in g) + (-c / s,)), (1 if lead > 0 else -1)


def _unit_direction(g) -> tuple:
    g = [Fraction(x) for x in g]
    lead = next(x for x in g if x != 0)
    return tuple(x / abs(lead) for x in g)


@dataclass
class _Geometry:
    """Per-cell geometry recomputed from the halfspaces."""

    polys: list[HPolytope]
    kept: list[int]
    dropped: list[int]
    unbounded: list[int]


def _analyse(mesh: PAField) -> _Geometry:
    polys, kept, dropped, unbounded = [], [], [], []
    bounded_cache: dict[tuple, bool] = {}
    for i, cell in enumerate(mesh.cells):
        poly = HPolytope(mesh.n, cell.poly.halfspaces)
        polys.append(poly)
        normals = tuple(sorted(set(_unit_direction(g) for g, _ in poly.halfspaces if any(g))))
        if normals not in bounded_cache:
            bounded_cache[normals] = len(normals) > mesh.n and origin_in_interior(normals, mesh.n)
        verts = poly.vertices
        if not verts:
            dropped.append(i)
            continue
        if not bounded_cache[normals]:
            unbounded.append(i)
            continue
        if poly.volume == 0:
            dropped.append(i)
        else:
            kept.append(i)
    return _Geometry(polys, kept, dropped, unbounded)


@dataclass
class VerificationReport:
    per_cell_curl: list[tuple[int, KForm, int | None]]
    continuity_ok: bool
    continuity_violations: list[tuple[int, int]]
    boundary_ok: bool
    boundary_violations: list[int]
    overlaps: list[tuple[int, int]]
    outside_domain: list[int]
    measures: list[Fraction]
    covered_volume: Fraction
    declared_covered_volume: Fraction
    integral: tuple[Fraction, ...]
    verdict: str
    reasons: list[str]
    violations: list[Violation]
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json(self) -> dict:
        return {
            "per_cell_curl": [
                {"cell": i, "curl": w.to_json(), "element": m} for i, w, m in self.per_cell_curl
            ],
            "continuity_ok": self.continuity_ok,
            "continuity_violations": [list(p) for p in self.continuity_violations],
            "boundary_ok": self.boundary_ok,
            "boundary_violations": list(self.boundary_violations),
            "overlaps": [list(p) for p in self.overlaps],
            "outside_domain": list(self.outside_domain),
            "measures": format_vector(self.measures),
            "covered_volume": format_rational(self.covered_volume),
            "declared_covered_volume": format_rational(self.declared_covered_volume),
            "integral": format_vector(self.integral),
            "verdict": self.verdict,
            "reasons": list(self.reasons),
            "violations": [v.value for v in self.violations],
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, obj) -> "VerificationReport":
        return cls(
            per_cell_curl=[(d["cell"], KForm.from_json(d["curl"]), d["element"]) for d in obj["per_cell_curl"]],
            continuity_ok=obj["continuity_ok"],
            continuity_violations=[tuple(p) for p in obj["continuity_violations"]],
            boundary_ok=obj["boundary_ok"],
            boundary_violations=list(obj["boundary_violations"]),
            overlaps=[tuple(p) for p in obj["overlaps"]],
            outside_domain=list(obj["outside_domain"]),
            measures=list(parse_vector(obj["measures"])),
            covered_volume=parse_rational(obj["covered_volume"]),
            declared_covered_volume=parse_rational(obj["declared_covered_volume"]),
            integral=parse_vector(obj["integral"]),
            verdict=obj["verdict"],
            reasons=list(obj["reasons"]),
            violations=[Violation(v) for v in obj["violations"]],
            notes=list(obj["notes"]),
        )


def check_membership(mesh: PAField, E: FormSet, geo: _Geometry | None = None) -> list[tuple[int, KForm, int | None]]:
    geo = geo or _analyse(mesh)
    lookup = {e: i for i, e in enumerate(E)}
    out = []
    for i in geo.kept:
        w = cell_curl(mesh.cells[i].matrix, mesh.n)
        out.append((i, w, lookup.get(w)))
    return out


def _vertex_values(mesh: PAField, geo: _Geometry, i: int) -> dict[tuple, tuple[Fraction, ...]]:
    """Values of cell i's affine map at each of its vertices, keyed by vertex."""
    cell, poly = mesh.cells[i], geo.polys[i]
    ints, d = poly.scaled_vertices
    scale = lcm(*(x.denominator for row in cell.matrix for x in row), *(x.denominator for x in cell.offset))
    a = [[int(x * scale) for x in row] for row in cell.matrix]
    c = [int(x * scale) for x in cell.offset]
    out = {}
    for v, vi in zip(poly.vertices, ints):
        out[v] = tuple(
            Fraction(sum(p * q for p, q in zip(row, vi)) + cj * d, scale * d) for row, cj in zip(a, c)
        )
    return out


def _facet_table(mesh: PAField, geo: _Geometry):
    table = defaultdict(list)
    for i in geo.kept:
        poly = geo.polys[i]
        verts = poly.vertices
        for (g, c), s in poly.facets:
            key, orient = _plane_key(g, c)
            table[(key, frozenset(verts[j] for j in s))].append((i, orient))
    return table


def check_continuity(mesh: PAField, geo: _Geometry | None = None) -> tuple[bool, list[tuple[int, int]], list[int]]:
    """Matched facets must agree at their vertices; unmatched facets must vanish there.

    Returns (ok, violating cell pairs, cells with a nonzero unmatched facet).
    """
    geo = geo or _analyse(mesh)
    values: dict[int, dict] = {}

    def val(i):
        if i not in values:
            values[i] = _vertex_values(mesh, geo, i)
        return values[i]

    pairs, boundary = [], []
    for (_, verts), owners in _facet_table(mesh, geo).items():
        if len(owners) == 2 and owners[0][1] != owners[1][1]:
            (i, _), (j, _) = owners
            vi, vj = val(i), val(j)
            if any(vi[v] != vj[v] for v in verts):
                pairs.append((min(i, j), max(i, j)))
        elif len(owners) == 1:
            i = owners[0][0]
            vi = val(i)
            if any(any(vi[v]) for v in verts):
                boundary.append(i)
        else:
            # the same facet claimed from one side twice: cells overlap, reported there
            for (i, _), (j, _) in combinations(owners, 2):
                pairs.append((min(i, j), max(i, j)))
    pairs = sorted(set(pairs))
    boundary = sorted(set(boundary))
    return not pairs and not boundary, pairs, boundary


def check_boundary_zero(mesh: PAField, geo: _Geometry | None = None) -> bool:
    return not check_continuity(mesh, geo)[2]


def _candidate_pairs(ids: list[int], boxes: dict) -> list[tuple[int, int]]:
    """Pairs whose bounding boxes might overlap, via a uniform spatial hash on float bounds.

    Rounding Fraction -> float is monotone, so floats that are strictly
    separated certify exact separation; anything else stays a candidate.
    """
    if not ids:
        return []
    fb = {i: ([float(x) for x in boxes[i][0]], [float(x) for x in boxes[i][1]]) for i in ids}
    sizes = sorted(max(h - l for l, h in zip(*fb[i])) for i in ids)
    h = sizes[len(sizes) // 2] or 1.0
    buckets = defaultdict(list)
    big = []  # cells spanning too many buckets are paired with everything
    for i in ids:
        lo, hi = fb[i]
        ranges = [range(floor(l / h), floor(u / h) + 1) for l, u in zip(lo, hi)]
        if prod(len(r) for r in ranges) > 4096:
            big.append(i)
            continue
        for key in product(*ranges):
            buckets[key].append(i)
    pairs = set()
    for members in buckets.values():
        for i, j in combinations(members, 2):
            pairs.add((min(i, j), max(i, j)))
    for i in big:
        for j in ids:
            if i != j:
                pairs.add((min(i, j), max(i, j)))
    out = []
    for i, j in sorted(pairs):
        (li, hi_), (lj, hj) = fb[i], fb[j]
        if any(a < c for a, c in zip(hi_, lj)) or any(a < c for a, c in zip(hj, li)):
            continue
        out.append((i, j))
    return out


def _overlaps(mesh: PAField, geo: _Geometry) -> list[tuple[int, int]]:
    n = mesh.n
    boxes = {i: geo.polys[i].bbox for i in geo.kept}
    directions = sorted({_unit_direction(g) for i in geo.kept for g, _ in geo.polys[i].halfspaces})
    extent_cache: dict[tuple[int, int], tuple[Fraction, Fraction]] = {}

    scaled_dirs = []
    for d in directions:
        m = lcm(*(x.denominator for x in d))
        scaled_dirs.append(([int(x * m) for x in d], m))

    def extent(i, d):
        key = (i, d)
        if key not in extent_cache:
            ints, den = geo.polys[i].scaled_vertices
            g, m = scaled_dirs[d]
            vals = [sum(a * x for a, x in zip(g, v)) for v in ints]
            extent_cache[key] = (Fraction(min(vals), den * m), Fraction(max(vals), den * m))
        return extent_cache[key]

    found = []
    for i, j in _candidate_pairs(geo.kept, boxes):
        lo_i, hi_i = boxes[i]
        lo_j, hi_j = boxes[j]
        if any(max(a, c) >= min(b, d) for a, b, c, d in zip(lo_i, hi_i, lo_j, hi_j)):
            continue
        separated = False
        for d in range(len(directions)):
            a0, a1 = extent(i, d)
            b0, b1 = extent(j, d)
            if a1 <= b0 or b1 <= a0:
                separated = True
                break
        if not separated and interiors_intersect(geo.polys[i].halfspaces, geo.polys[j].halfspaces, n):
            found.append((i, j))
    return sorted(found)


def measure_by_element(mesh: PAField, E: FormSet, geo: _Geometry | None = None) -> list[Fraction]:
    geo = geo or _analyse(mesh)
    measures = [Fraction(0)] * len(E)
    for i, _, m in check_membership(mesh, E, geo):
        if m is None:
            raise ValueError(f"cell {i} has a curl outside E")
        measures[m] += geo.polys[i].volume
    return measures


def integrate_field(mesh: PAField, geo: _Geometry | None = None) -> tuple[Fraction, ...]:
    geo = geo or _analyse(mesh)
    total = [Fraction(0)] * mesh.n
    for i in geo.kept:
        cell = mesh.cells[i]
        for j, x in enumerate(geo.polys[i].integrate_affine(cell.matrix, cell.offset)):
            total[j] += x
    return tuple(total)


def verify(mesh: PAField, E: FormSet, require_nonzero_integral: bool = False) -> VerificationReport:
    reasons: list[str] = []
    violations: list[Violation] = []
    notes: list[str] = []

    def fail(kind: Violation, msg: str):
        if kind not in violations:
            violations.append(kind)
        reasons.append(msg)

    if mesh.n != E.n:
        fail(Violation.DIMENSION, f"mesh lives in R^{mesh.n}, E in R^{E.n}")
        return VerificationReport(
            [], False, [], False, [], [], [], [Fraction(0)] * len(E), Fraction(0),
            mesh.covered_volume, (Fraction(0),) * mesh.n, "FAIL", reasons, violations,
        )

    geo = _analyse(mesh)
    if geo.dropped:
        notes.append(f"{len(geo.dropped)} zero-volume cell(s) discarded")
    if geo.unbounded:
        fail(Violation.UNBOUNDED, f"unbounded cells: {geo.unbounded[:10]}")

    table = check_membership(mesh, E, geo)
    bad = [i for i, _, m in table if m is None]
    if bad:
        fail(Violation.CURL, f"{len(bad)} cell(s) with curl outside E, first {bad[:10]}")

    ok, pairs, boundary = check_continuity(mesh, geo)
    if pairs:
        fail(Violation.CONTINUITY, f"{len(pairs)} facet pair(s) where the affine maps disagree, first {pairs[:5]}")
    if boundary:
        fail(Violation.BOUNDARY, f"{len(boundary)} cell(s) nonzero on an unshared facet, first {boundary[:10]}")

    overlaps = _overlaps(mesh, geo)
    if overlaps:
        fail(Violation.OVERLAP, f"{len(overlaps)} pair(s) of cells with overlapping interiors, first {overlaps[:5]}")

    outside = [
        i for i in geo.kept
        if not any(all(b.contains_point(v) for v in geo.polys[i].vertices) for b in mesh.domain.boxes)
    ]
    if outside:
        fail(Violation.CONTAINMENT, f"{len(outside)} cell(s) not inside a single domain box, first {outside[:10]}")

    volumes = {i: geo.polys[i].volume for i in geo.kept}
    covered = sum(volumes.values(), Fraction(0))
    measures = [Fraction(0)] * len(E)
    for i, _, m in table:
        if m is not None:
            measures[m] += volumes[i]
    if not bad:
        missing = [k for k, v in enumerate(measures) if v <= 0]
        if missing:
            fail(Violation.MEASURE, f"elements attained on zero measure: {missing}")
        assert sum(measures) == covered
    if covered != mesh.covered_volume:
        fail(Violation.COVERED_VOLUME, f"declared covered volume {mesh.covered_volume} != computed {covered}")

    integral = integrate_field(mesh, geo)
    if require_nonzero_integral and not any(integral):
        fail(Violation.INTEGRAL, "integral of eta is zero")

    return VerificationReport(
        per_cell_curl=table,
        continuity_ok=not pairs,
        continuity_violations=pairs,
        boundary_ok=not boundary,
        boundary_violations=boundary,
        overlaps=overlaps,
        outside_domain=outside,
        measures=measures,
        covered_volume=covered,
        declared_covered_volume=mesh.covered_volume,
        integral=integral,
        verdict="FAIL" if violations else "PASS",
        reasons=reasons,
        violations=violations,
        notes=notes,
    )
