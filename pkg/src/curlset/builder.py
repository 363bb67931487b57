"""Explicit piecewise-affine solutions eta of curl eta in E.

Single-line case: every e in E is a_e ^ b. Lift the a_e along b to a point
set F with 0 in the interior of co F, take the gauge u(x) = 1 - max_v <-v, x>
on P = {u >= 0} and set eta = u b. On the cell where v attains the max,
eta(x) = (1 + <v, x>) b, whose curl is v ^ b = e. Homothets
z -> t eta((z - a) / t) of this block keep the curl and vanish on their
boundary, so disjoint copies can be packed into a box and extended by zero.

Two packings are provided. The axis tiling applies when b and all a_e are
coordinate directions: a sheared prism whose copies stack exactly along b,
covering K/(K+1) of a box column. The generic packing is a greedy dyadic
fill that inscribes a homothet into every grid cell not yet touched.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, gcd, lcm
from typing import Sequence

from . import linalg
from .exterior import Vector, cartan_divide, unit
from .mesh import Box, BoxDomain, Cell, PAField, split_equal
from .polytope import HPolytope, affine_dim, enumerate_vertices, origin_in_interior, zero_in_relint
from .setlab import FormSet, RicoCertificate, common_line, rico_membership, span_dim

log = logging.getLogger(__name__)

DEFAULT_MAX_LEVELS = 12


class ConstructionError(ValueError):
    """The inputs do not satisfy the preconditions of a construction."""

    def __init__(self, message, certificate: RicoCertificate | None = None):
        super().__init__(message)
        self.certificate = certificate


class CoverageError(RuntimeError):
    """Greedy filling ran out of grid levels before reaching the target coverage."""

    def __init__(self, message, report: "FillReport"):
        super().__init__(message)
        self.report = report


# --- gauge blocks -------------------------------------------------------------------


def canonical_reps(E: FormSet, b: Sequence) -> list[Vector]:
    """a_e orthogonal to b with a_e ^ b = e."""
    return [cartan_divide(e, b) for e in E]


@dataclass(frozen=True)
class LiftedPoint:
    element: int
    vertex: Vector
    height: Fraction


def lift_with_heights(reps: Sequence[Vector], b: Sequence, favored: int) -> list[LiftedPoint]:
    """F = {a_e + s M_e b : s = +-1}, M = 2 for the favored element and 1 otherwise."""
    if not reps:
        raise ConstructionError("no representatives")
    n = len(b)
    b = tuple(Fraction(x) for x in b)
    if n < 2:
        raise ConstructionError("need n >= 2")
    if any(linalg.dot(a, b) != 0 for a in reps):
        raise ConstructionError("representatives are not orthogonal to b")
    if linalg.rank(list(reps)) != n - 1:
        raise ConstructionError("representatives do not span the complement of b")
    if not zero_in_relint(reps):
        raise ConstructionError("0 is not a strictly positive combination of the representatives")
    F = []
    for i, a in enumerate(reps):
        m = Fraction(2 if i == favored else 1)
        for s in (1, -1):
            F.append(LiftedPoint(i, tuple(x + s * m * y for x, y in zip(a, b)), s * m))
    if not origin_in_interior([p.vertex for p in F], n):
        raise ConstructionError("0 is not interior to co F")
    return F


@dataclass
class GaugePolytope:
    """P = {x : <-v, x> <= 1 for v in F} with one pyramid cell per vertex v of co F."""

    n: int
    b: Vector
    lifted: list[LiftedPoint]
    polytope: HPolytope
    cells: list[tuple[LiftedPoint, HPolytope]]

    def field(self) -> list[Cell]:
        return [Cell(poly, gauge_matrix(p.vertex, self.b), self.b) for p, poly in self.cells]

    @property
    def integral_u(self) -> Fraction:
        """Integral of u over P."""
        total = Fraction(0)
        for p, poly in self.cells:
            total += poly.volume + linalg.dot(p.vertex, poly.moment)
        return total


def gauge_matrix(v: Sequence, b: Sequence) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(bi) * vj for vj in v) for bi in b)


def build_gauge(F: Sequence[LiftedPoint], b: Sequence) -> GaugePolytope:
    n = len(b)
    pts = {}
    for p in F:
        pts.setdefault(p.vertex, p)
    F = list(pts.values())
    if not origin_in_interior([p.vertex for p in F], n):
        raise ConstructionError("0 is not interior to co F; P would be unbounded")
    hs = tuple((tuple(-x for x in p.vertex), Fraction(1)) for p in F)
    verts = enumerate_vertices(hs, n)
    P = HPolytope(n, hs, tuple(verts))
    origin = (Fraction(0),) * n
    cells = []
    for p in F:
        v = p.vertex
        base = [x for x in verts if -linalg.dot(v, x) == 1]
        cands = [(tuple(a - c for a, c in zip(v, q.vertex)), Fraction(0)) for q in F if q is not p]
        cands.append((tuple(-x for x in v), Fraction(1)))
        cell = HPolytope.from_candidates(n, cands, base + [origin])
        if len(cell.facets) and cell.volume > 0:
            cells.append((p, cell))
    return GaugePolytope(n, tuple(Fraction(x) for x in b), F, P, cells)


@dataclass
class Placement:
    center: Vector
    scale: Fraction
    gauge: GaugePolytope

    def cells(self) -> list[Cell]:
        t, a, b = self.scale, self.center, self.gauge.b
        out = []
        for p, poly in self.gauge.cells:
            # eta(z) = t (1 + <v, (z - a)/t>) b = b v^T z + (t - <v, a>) b
            shift = t - linalg.dot(p.vertex, a)
            out.append(Cell(poly.transformed(a, t), gauge_matrix(p.vertex, b), tuple(shift * x for x in b)))
        return out

    @property
    def volume(self) -> Fraction:
        return self.scale ** self.gauge.n * self.gauge.polytope.volume


# --- greedy dyadic fill -------------------------------------------------------------


@dataclass
class FillReport:
    placements: list[Placement]
    covered: Fraction
    target: Fraction
    levels: int

    @property
    def complete(self) -> bool:
        return self.covered >= self.target


def max_grid_levels() -> int:
    raw = os.environ.get("CURLSET_MAX_GRID_LEVELS")
    return int(raw) if raw else DEFAULT_MAX_LEVELS


def _inscribe(cell: Box, shape: GaugePolytope) -> list[tuple[Vector, Fraction]]:
    """Largest homothets of the shape in an aspect-matched grid of the cell.

    The cell is cut into floor(r_j / t) pieces along axis j, where r_j is the
    ratio of cell to shape extents and t their minimum, and one homothet is
    centered in every piece.
    """
    lo, hi = shape.polytope.bbox
    ratios = [e / (h - l) for e, l, h in zip(cell.extents, lo, hi)]
    t = min(ratios)
    counts = [int(r / t) for r in ratios]
    steps = [e / m for e, m in zip(cell.extents, counts)]
    out = []
    for idx in product(*(range(m) for m in counts)):
        a = tuple(
            cl + (i + Fraction(1, 2)) * st - t * (l + h) / 2
            for cl, i, st, l, h in zip(cell.lower, idx, steps, lo, hi)
        )
        out.append((a, t))
    return out


def _box_halfspaces(box: Box):
    n = box.n
    hs = []
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        hs.append((e, box.upper[j]))
        hs.append((tuple(-x for x in e), -box.lower[j]))
    return hs


def _relation(cell: Box, poly: HPolytope) -> str:
    """'inside', 'disjoint' or 'partial' for the interiors of a grid cell and a placed homothet."""
    lo, hi = poly.bbox
    if any(h <= cl or l >= ch for l, h, cl, ch in zip(lo, hi, cell.lower, cell.upper)):
        return "disjoint"
    inside = True
    for g, c in poly.halfspaces:
        box_min = sum(gi * (cl if gi > 0 else ch) for gi, cl, ch in zip(g, cell.lower, cell.upper))
        if box_min >= c:
            return "disjoint"
        box_max = sum(gi * (ch if gi > 0 else cl) for gi, cl, ch in zip(g, cell.lower, cell.upper))
        if box_max > c:
            inside = False
    if inside:
        return "inside"
    common = enumerate_vertices(_box_halfspaces(cell) + list(poly.halfspaces), cell.n)
    return "partial" if affine_dim(common) == cell.n else "disjoint"


def _children(box: Box) -> list[Box]:
    out = [box]
    for axis in range(box.n):
        mid = (box.lower[axis] + box.upper[axis]) / 2
        out = [half for b in out for half in b.split(axis, mid)]
    return out


def fill_box(box: Box, shape: GaugePolytope, epsilon, max_levels: int | None = None) -> FillReport:
    """Greedy multiscale packing of disjoint homothets of shape.polytope into box.

    Each free cell of a dyadic grid gets the largest homothets that fit in an
    aspect-matched subgrid of it. Homothets live inside their own grid cell,
    so two of them can only meet if one cell contains the other; cells only
    test against the homothets of their ancestors.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if max_levels is None:
        max_levels = max_grid_levels()
    target = (1 - epsilon) * box.volume
    vol_p = shape.polytope.volume
    placements: list[Placement] = []
    covered = Fraction(0)
    active = [(box, [])]
    for level in range(max_levels + 1):
        nxt = []
        for cell, ancestors in active:
            touching = []
            dropped = False
            for poly in ancestors:
                rel = _relation(cell, poly)
                if rel == "inside":
                    dropped = True
                    break
                if rel == "partial":
                    touching.append(poly)
            if dropped:
                continue
            if not touching:
                for a, t in _inscribe(cell, shape):
                    placements.append(Placement(a, t, shape))
                    covered += t**cell.n * vol_p
                    touching.append(shape.polytope.transformed(a, t))
                if covered >= target:
                    return FillReport(placements, covered, target, level)
            nxt.extend((child, touching) for child in _children(cell))
        active = nxt
        log.debug("level %d: %d placements, coverage %s", level, len(placements), float(covered / box.volume))
    return FillReport(placements, covered, target, max_levels)


# --- axis tiling --------------------------------------------------------------------


def _axis_of(v: Sequence) -> tuple[int, Fraction] | None:
    nz = [(j, x) for j, x in enumerate(v) if x != 0]
    return nz[0] if len(nz) == 1 else None


def _rational_gcd(values: Sequence[Fraction]) -> Fraction:
    d = lcm(*(v.denominator for v in values))
    return Fraction(gcd(*(int(v * d) for v in values)), d)


def tiling_configs(E: FormSet, b: Sequence) -> tuple[int, list[dict[int, tuple[tuple[int, Fraction], tuple[int, Fraction]]]]] | None:
    """When b and every a_e are coordinate directions: the axis k of b and a list of configurations.

    A configuration maps each other axis j to ((index, alpha), (index, beta)):
    one element with a_e = alpha e^j and one with a_e = -beta e^j. Several
    configurations are needed when an axis carries more than one element of
    a sign; together they use every element.
    """
    ax = _axis_of(b)
    if ax is None:
        return None
    k = ax[0]
    ek = unit(E.n, k + 1)
    groups: dict[tuple[int, int], list[tuple[int, Fraction]]] = {}
    for i, e in enumerate(E):
        a = cartan_divide(e, ek)
        ax = _axis_of(a)
        if ax is None:
            return None
        j, x = ax
        groups.setdefault((j, 1 if x > 0 else -1), []).append((i, abs(x)))
    others = [j for j in range(E.n) if j != k]
    if any((j, s) not in groups for j in others for s in (1, -1)):
        return None
    count = max(len(g) for g in groups.values())
    configs = []
    for c in range(count):
        configs.append({j: (groups[(j, 1)][c % len(groups[(j, 1)])], groups[(j, -1)][c % len(groups[(j, -1)])]) for j in others})
    return k, configs


def tile_box(box: Box, k: int, config, epsilon) -> list[Placement]:
    """Stack copies of a sheared prism along axis k, in columns over the other axes.

    F holds alpha_j e^j and -beta_j e^j for every axis j != k, plus
    alpha_s e^s + M e^k and -beta_s e^s - M' e^k for the first such axis s,
    with M' = M beta_s / alpha_s. Then P = {x' in prod [-1/alpha_j, 1/beta_j],
    l(x_s) <= x_k <= l(x_s) + T0} with T0 = (1 + alpha_s/beta_s)/M, so copies
    translated by T0 along e^k fit together face to face. N slots of height T
    in a column of height L hold N - 1 copies: coverage (N-1)/N.
    """
    epsilon = Fraction(epsilon)
    n = box.n
    others = sorted(config)
    s = others[0]
    alpha = {j: config[j][0][1] for j in others}
    beta = {j: config[j][1][1] for j in others}
    widths = {j: 1 / alpha[j] + 1 / beta[j] for j in others}
    ext = box.extents
    t = _rational_gcd([ext[j] / widths[j] for j in others])
    slots = max(2, ceil(1 / epsilon))
    T = ext[k] / slots
    M = t * (1 + alpha[s] / beta[s]) / T
    Mp = M * beta[s] / alpha[s]
    ek = unit(n, k + 1)
    F = []
    for j in others:
        ej = unit(n, j + 1)
        F.append(LiftedPoint(config[j][0][0], tuple(alpha[j] * x for x in ej), Fraction(0)))
        F.append(LiftedPoint(config[j][1][0], tuple(-beta[j] * x for x in ej), Fraction(0)))
    es = unit(n, s + 1)
    F.append(LiftedPoint(config[s][0][0], tuple(alpha[s] * x + M * y for x, y in zip(es, ek)), M))
    F.append(LiftedPoint(config[s][1][0], tuple(-beta[s] * x - Mp * y for x, y in zip(es, ek)), -Mp))
    gauge = build_gauge(F, ek)
    columns = [range(int(ext[j] / (t * widths[j]))) for j in others]
    placements = []

    def walk(depth, center):
        if depth == len(others):
            for i in range(slots - 1):
                a = list(center)
                a[k] = box.lower[k] + T * (i + 1)
                placements.append(Placement(tuple(a), t, gauge))
            return
        j = others[depth]
        for c in columns[depth]:
            center[j] = box.lower[j] + c * t * widths[j] + t / alpha[j]
            walk(depth + 1, center)

    walk(0, [Fraction(0)] * n)
    return placements


# --- solutions ----------------------------------------------------------------------


@dataclass
class Solution:
    field: PAField
    placements: list[Placement]
    element_boxes: list[tuple[int, Box]] = field(default_factory=list)


def _check_line_case(E: FormSet, b):
    if E.n < 3:
        raise ConstructionError("line solutions need n >= 3")
    if any(e.is_zero() for e in E):
        raise ConstructionError("E contains 0")
    line = common_line(E)
    if line is None:
        raise ConstructionError("E does not lie in R^n ^ b for a single line b")
    if b is None:
        b = line
    b = tuple(Fraction(x) for x in b)
    if len(b) != E.n or linalg.rank([b, line]) != 1:
        raise ConstructionError("b is not the common line of E")
    if span_dim(E) != E.n - 1:
        raise ConstructionError("dim span E must equal n-1")
    cert = rico_membership(E)
    if not cert.verdict:
        raise ConstructionError("0 is not in ri co E", certificate=cert)
    return b


def build_line_solution(E: FormSet, b=None, domain: BoxDomain | None = None, epsilon=Fraction(1, 100), method: str = "auto", max_levels: int | None = None) -> Solution:
    """Piecewise-affine eta with curl eta in E on every cell, each e on positive volume, coverage >= 1 - epsilon."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ConstructionError("epsilon must lie in (0, 1)")
    domain = domain or BoxDomain.unit_cube(E.n)
    if domain.n != E.n:
        raise ConstructionError("domain dimension does not match E")
    b = _check_line_case(E, b)
    if method not in ("auto", "tiling", "greedy"):
        raise ValueError(f"unknown method {method!r}")
    tiling = tiling_configs(E, b) if method != "greedy" else None
    if method == "tiling" and tiling is None:
        raise ConstructionError("axis tiling needs b and every a_e along coordinate axes")

    placements: list[Placement] = []
    element_boxes = []
    notes = []
    if tiling is not None:
        k, configs = tiling
        for box in domain.boxes:
            for config, sub in zip(configs, split_equal(box, len(configs))):
                placements += tile_box(sub, k, config, epsilon)
        notes.append(f"axis tiling along axis {k + 1}, {len(configs)} configuration(s)")
    else:
        reps = canonical_reps(E, b)
        for box in domain.boxes:
            for i, sub in enumerate(split_equal(box, len(E))):
                gauge = build_gauge(lift_with_heights(reps, b, favored=i), b)
                rep = fill_box(sub, gauge, epsilon, max_levels)
                if not rep.complete:
                    raise CoverageError(
                        f"coverage {rep.covered / sub.volume} < {1 - epsilon} after {rep.levels} levels", rep
                    )
                placements += rep.placements
                element_boxes.append((i, sub))
        notes.append("greedy dyadic fill, one favored sub-box per element")
    cells = [c for p in placements for c in p.cells()]
    covered = sum((p.volume for p in placements), Fraction(0))
    return Solution(PAField(E.n, cells, domain, covered, notes), placements, element_boxes)


def build_composite(parts: Sequence[tuple[FormSet, Sequence | None]], domain: BoxDomain | None = None, epsilon=Fraction(1, 100), method: str = "auto", max_levels: int | None = None) -> Solution:
    """Two line-solvable parts on the two halves (along axis 1) of every domain box."""
    if len(parts) != 2:
        raise ConstructionError("composite construction takes exactly two parts")
    (E1, b1), (E2, b2) = parts
    if E1.n != E2.n:
        raise ConstructionError("parts live in different dimensions")
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ConstructionError("epsilon must lie in (0, 1)")
    domain = domain or BoxDomain.unit_cube(E1.n)
    halves = [box.split(0, (box.lower[0] + box.upper[0]) / 2) for box in domain.boxes]
    left = BoxDomain(tuple(h[0] for h in halves))
    right = BoxDomain(tuple(h[1] for h in halves))
    s1 = build_line_solution(E1, b1, left, epsilon, method, max_levels)
    s2 = build_line_solution(E2, b2, right, epsilon, method, max_levels)
    f = PAField(
        E1.n,
        s1.field.cells + s2.field.cells,
        domain,
        s1.field.covered_volume + s2.field.covered_volume,
        ["part 1: " + x for x in s1.field.notes] + ["part 2: " + x for x in s2.field.notes],
    )
    return Solution(f, s1.placements + s2.placements)


def construct(E: FormSet, domain: BoxDomain | None = None, epsilon=Fraction(1, 100), partition_hint=None, method: str = "auto") -> Solution:
    """Classify E and run the matching construction."""
    from .setlab import Verdict, classify

    report = classify(E, partition_hint)
    if report.verdict == Verdict.SOLVABLE_LINE:
        return build_line_solution(E, report.common_line, domain, epsilon, method)
    if report.verdict == Verdict.SOLVABLE_COMPOSITE:
        parts = [(E.subset(p), b) for p, b in zip(report.partition, report.part_lines)]
        return build_composite(parts, domain, epsilon, method)
    raise ConstructionError(f"no construction for verdict {report.verdict.value}", certificate=report.rico)
