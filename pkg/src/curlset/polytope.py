"""Exact H-polytopes: vertices, facets, triangulation, volume and moments.

Everything is rational. Vertices come from brute-force enumeration of
n-subsets of the halfspaces with a fraction-free integer solver, which is
fast enough for the small cells produced by the gauge construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Iterable, Sequence

from . import linalg
from .lp import linprog
from .rational import format_rational, format_vector, parse_rational, parse_vector

Point = tuple[Fraction, ...]
# normal . x <= offset
Halfspace = tuple[Point, Fraction]


def halfspace(normal: Sequence, offset) -> Halfspace:
    return tuple(Fraction(x) for x in normal), Fraction(offset)


def _integer_row(h: Halfspace) -> tuple[list[int], int]:
    g, c = h
    d = lcm(*(x.denominator for x in g), c.denominator)
    return [int(x * d) for x in g], int(c * d)


def _scaled(points: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """Integer coordinates: points = ints / d."""
    d = lcm(1, *(Fraction(x).denominator for p in points for x in p))
    return [[int(Fraction(x) * d) for x in p] for p in points], d


def _affine_dim_int(points: Sequence[Sequence[int]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    return linalg.rank_int([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def affine_dim(points: Sequence[Sequence]) -> int:
    return _affine_dim_int(_scaled(points)[0])


def enumerate_vertices(halfspaces: Sequence[Halfspace], n: int) -> list[Point]:
    rows = [_integer_row(h) for h in halfspaces]
    seen = set()
    out = []
    for idx in combinations(range(len(rows)), n):
        sol = linalg.solve_square_int([rows[i][0] for i in idx], [rows[i][1] for i in idx])
        if sol is None:
            continue
        nums, den = sol
        g = gcd(den, *nums)
        if g > 1:
            nums, den = [x // g for x in nums], den // g
        key = (tuple(nums), den)
        if key in seen:
            continue
        if all(sum(a * x for a, x in zip(g_row, nums)) <= c * den for g_row, c in rows):
            seen.add(key)
            out.append(tuple(Fraction(x, den) for x in nums))
    out.sort()
    return out


def tight_set(h: Halfspace, verts: Sequence[Point]) -> frozenset[int]:
    ints, d = _scaled(verts)
    g, c = _integer_row(h)
    return frozenset(i for i, v in enumerate(ints) if sum(a * x for a, x in zip(g, v)) == c * d)


def facet_halfspaces(
    halfspaces: Iterable[Halfspace], verts: Sequence[Point], n: int
) -> list[tuple[Halfspace, frozenset[int]]]:
    """Irredundant halfspaces: those tight on an (n-1)-dimensional vertex set, one per facet."""
    ints, d = _scaled(verts)
    out = []
    seen = set()
    for h in halfspaces:
        g, c = _integer_row(h)
        s = frozenset(i for i, v in enumerate(ints) if sum(a * x for a, x in zip(g, v)) == c * d)
        if len(s) < n or s in seen:
            continue
        if _affine_dim_int([ints[i] for i in s]) == n - 1:
            seen.add(s)
            out.append((h, s))
    return out


def triangulate(verts: Sequence[Point], facet_sets: Sequence[frozenset[int]], n: int) -> list[tuple[int, ...]]:
    """Pulling triangulation: cone the smallest vertex over every face not containing it."""
    ints, _ = _scaled(verts)
    memo: dict[frozenset, list] = {}

    def faces_of(face: frozenset, dim: int) -> set[frozenset]:
        subs = set()
        for g in facet_sets:
            s = face & g
            if len(s) >= dim and s != face and s not in subs:
                if _affine_dim_int([ints[i] for i in s]) == dim - 1:
                    subs.add(s)
        return subs

    def go(face: frozenset, dim: int) -> list[tuple[int, ...]]:
        if face in memo:
            return memo[face]
        if len(face) == dim + 1:
            res = [tuple(sorted(face))]
        else:
            p = min(face)
            res = [(p,) + simp for s in faces_of(face, dim) if p not in s for simp in go(s, dim - 1)]
        memo[face] = res
        return res

    everything = frozenset(range(len(verts)))
    if len(verts) < n + 1:
        return []
    return go(everything, n)


def simplex_volume(pts: Sequence[Point]) -> Fraction:
    ints, d = _scaled(pts)
    p0 = ints[0]
    det = linalg.det_int([[a - b for a, b in zip(p, p0)] for p in ints[1:]])
    return Fraction(abs(det), factorial(len(pts) - 1) * d ** (len(pts) - 1))


@dataclass(frozen=True)
class HPolytope:
    """{x : normal . x <= offset for every halfspace}, assumed bounded."""

    n: int
    halfspaces: tuple[Halfspace, ...]
    _known_vertices: tuple[Point, ...] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_candidates(cls, n: int, candidates: Iterable[Halfspace], verts: Sequence[Point]) -> "HPolytope":
        """Prune candidate halfspaces to facets, given the true vertex set."""
        verts = tuple(sorted(set(verts)))
        hs = tuple(h for h, _ in facet_halfspaces(candidates, verts, n))
        return cls(n, hs, verts)

    @cached_property
    def vertices(self) -> list[Point]:
        if self._known_vertices is not None:
            return list(self._known_vertices)
        return enumerate_vertices(self.halfspaces, self.n)

    @cached_property
    def scaled_vertices(self) -> tuple[list[list[int]], int]:
        """(integer coordinates, common denominator) of the vertices."""
        return _scaled(self.vertices)

    @cached_property
    def facets(self) -> list[tuple[Halfspace, frozenset[int]]]:
        return facet_halfspaces(self.halfspaces, self.vertices, self.n)

    @cached_property
    def simplices(self) -> list[tuple[int, ...]]:
        return triangulate(self.vertices, [s for _, s in self.facets], self.n)

    @cached_property
    def _measure(self) -> tuple[Fraction, list[Fraction]]:
        n = self.n
        ints, d = self.scaled_vertices
        vol2 = 0  # sum of |det| over simplices, in units of 1/(n! d^n)
        mom = [0] * n  # sum of |det| * vertex-sum, in units of 1/(n! (n+1) d^(n+1))
        for simp in self.simplices:
            pts = [ints[i] for i in simp]
            p0 = pts[0]
            det = abs(linalg.det_int([[a - b for a, b in zip(p, p0)] for p in pts[1:]]))
            vol2 += det
            for j in range(n):
                mom[j] += det * sum(p[j] for p in pts)
        unit = factorial(n) * d**n
        return Fraction(vol2, unit), [Fraction(m, unit * (n + 1) * d) for m in mom]

    @property
    def volume(self) -> Fraction:
        return self._measure[0]

    @property
    def moment(self) -> list[Fraction]:
        """Integral of x over the polytope."""
        return self._measure[1]

    def integrate_affine(self, a: Sequence[Sequence], c: Sequence) -> list[Fraction]:
        vol, moment = self._measure
        return [linalg.dot(row, moment) + vol * ci for row, ci in zip(a, c)]

    @cached_property
    def bbox(self) -> tuple[Point, Point]:
        verts = self.vertices
        return (
            tuple(min(v[j] for v in verts) for j in range(self.n)),
            tuple(max(v[j] for v in verts) for j in range(self.n)),
        )

    def contains(self, x: Sequence) -> bool:
        return all(linalg.dot(g, x) <= c for g, c in self.halfspaces)

    def transformed(self, a: Sequence, t) -> "HPolytope":
        """The homothet a + t*self (t > 0)."""
        t = Fraction(t)
        hs = tuple((g, t * c + linalg.dot(g, a)) for g, c in self.halfspaces)
        known = None
        if self._known_vertices is not None or "vertices" in self.__dict__:
            known = tuple(tuple(ai + t * vi for ai, vi in zip(a, v)) for v in self.vertices)
        return HPolytope(self.n, hs, known)

    def to_json(self) -> list:
        return [{"normal": format_vector(g), "offset": format_rational(c)} for g, c in self.halfspaces]

    @classmethod
    def from_json(cls, n: int, obj) -> "HPolytope":
        hs = []
        for h in obj:
            if set(h) != {"normal", "offset"}:
                raise ValueError(f"halfspace must have exactly 'normal' and 'offset': {h!r}")
            g = parse_vector(h["normal"])
            if len(g) != n:
                raise ValueError("halfspace normal has the wrong length")
            hs.append((g, parse_rational(h["offset"])))
        return cls(n, tuple(hs))


def interiors_intersect(p: Sequence[Halfspace], q: Sequence[Halfspace], n: int) -> bool:
    """Exact LP: is there x with strict slack in every halfspace of both polytopes?"""
    rows = list(p) + list(q)
    a_ub = [list(g) + [Fraction(1)] for g, _ in rows] + [[Fraction(0)] * n + [Fraction(1)]]
    b_ub = [c for _, c in rows] + [Fraction(1)]
    res = linprog([0] * n + [1], a_ub, b_ub, free=range(n), maximize=True)
    return res.ok and res.objective > 0


def zero_in_relint(points: Sequence[Sequence]) -> bool:
    """0 is a strictly positive convex combination of all the points."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    n, m = len(pts[0]), len(pts)
    a_eq = [[p[r] for p in pts] + [0] for r in range(n)] + [[1] * m + [0]]
    a_ub = [[-int(i == j) for j in range(m)] + [1] for i in range(m)]
    res = linprog([0] * m + [1], a_ub, [0] * m, a_eq, [0] * n + [1], maximize=True)
    return res.ok and res.objective > 0


def origin_in_interior(points: Sequence[Sequence], n: int) -> bool:
    """0 in the interior of co(points)."""
    return linalg.rank([list(p) for p in points]) == n and zero_in_relint(points)
