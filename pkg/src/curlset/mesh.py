"""Piecewise-affine fields on box domains and their JSON mesh format.

A mesh lists cells (H-polytopes) each carrying an affine map x -> A x + c;
the field is zero off the cells. Rationals are stored as "p/q" strings.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .exterior import Vector
from .polytope import HPolytope
from .rational import format_rational, format_vector, parse_rational, parse_vector


@dataclass(frozen=True)
class Box:
    lower: Vector
    upper: Vector

    def __post_init__(self):
        lo = tuple(Fraction(x) for x in self.lower)
        hi = tuple(Fraction(x) for x in self.upper)
        if len(lo) != len(hi) or not lo:
            raise ValueError("box corners must have the same positive length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("box must have positive extent along every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def n(self) -> int:
        return len(self.lower)

    @property
    def extents(self) -> Vector:
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    @property
    def volume(self) -> Fraction:
        return prod(self.extents, start=Fraction(1))

    def split(self, axis: int, at) -> tuple["Box", "Box"]:
        lo, hi = list(self.lower), list(self.upper)
        left_hi, right_lo = hi[:], lo[:]
        left_hi[axis] = right_lo[axis] = Fraction(at)
        return Box(tuple(lo), tuple(left_hi)), Box(tuple(right_lo), tuple(hi))

    def contains_point(self, x) -> bool:
        return all(a <= xi <= b for a, xi, b in zip(self.lower, x, self.upper))

    def to_json(self) -> dict:
        return {"lower": format_vector(self.lower), "upper": format_vector(self.upper)}

    @classmethod
    def from_json(cls, obj) -> "Box":
        if not isinstance(obj, dict) or set(obj) != {"lower", "upper"}:
            raise ValueError("box must be an object with exactly 'lower' and 'upper'")
        return cls(parse_vector(obj["lower"]), parse_vector(obj["upper"]))


@dataclass(frozen=True)
class BoxDomain:
    boxes: tuple[Box, ...]

    def __post_init__(self):
        boxes = tuple(self.boxes)
        object.__setattr__(self, "boxes", boxes)
        if not boxes:
            raise ValueError("domain needs at least one box")
        if len({b.n for b in boxes}) != 1:
            raise ValueError("boxes of different dimensions")
        for i, p in enumerate(boxes):
            for q in boxes[i + 1:]:
                if all(max(a, c) < min(b, d) for a, b, c, d in zip(p.lower, p.upper, q.lower, q.upper)):
                    raise ValueError("domain boxes overlap")

    @classmethod
    def unit_cube(cls, n: int) -> "BoxDomain":
        return cls((Box((0,) * n, (1,) * n),))

    @property
    def n(self) -> int:
        return self.boxes[0].n

    @property
    def volume(self) -> Fraction:
        return sum((b.volume for b in self.boxes), Fraction(0))

    def to_json(self) -> list:
        return [b.to_json() for b in self.boxes]

    @classmethod
    def from_json(cls, obj) -> "BoxDomain":
        if not isinstance(obj, list):
            raise ValueError("domain must be a list of boxes")
        return cls(tuple(Box.from_json(b) for b in obj))


def split_equal(box: Box, parts: int) -> list[Box]:
    """Equal-volume pieces by recursive cuts across the longest axis (first one on ties)."""
    if parts == 1:
        return [box]
    ext = box.extents
    axis = ext.index(max(ext))
    left = parts // 2
    a, b = box.split(axis, box.lower[axis] + ext[axis] * Fraction(left, parts))
    return split_equal(a, left) + split_equal(b, parts - left)


@dataclass
class Cell:
    poly: HPolytope
    matrix: tuple[tuple[Fraction, ...], ...]
    offset: Vector

    def to_json(self) -> dict:
        return {
            "halfspaces": self.poly.to_json(),
            "affine": {"matrix": [format_vector(r) for r in self.matrix], "offset": format_vector(self.offset)},
        }

    @classmethod
    def from_json(cls, n: int, obj) -> "Cell":
        if not isinstance(obj, dict) or set(obj) != {"halfspaces", "affine"}:
            raise ValueError("cell must have exactly 'halfspaces' and 'affine'")
        aff = obj["affine"]
        if not isinstance(aff, dict) or set(aff) != {"matrix", "offset"}:
            raise ValueError("affine map must have exactly 'matrix' and 'offset'")
        matrix = tuple(parse_vector(r) for r in aff["matrix"])
        offset = parse_vector(aff["offset"])
        if len(matrix) != n or any(len(r) != n for r in matrix) or len(offset) != n:
            raise ValueError("affine map has the wrong shape")
        return cls(HPolytope.from_json(n, obj["halfspaces"]), matrix, offset)


@dataclass
class PAField:
    """Piecewise-affine field: eta = matrix x + offset on each cell, 0 elsewhere."""

    n: int
    cells: list[Cell]
    domain: BoxDomain
    covered_volume: Fraction
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "cells": [c.to_json() for c in self.cells],
            "domain": self.domain.to_json(),
            "covered_volume": format_rational(self.covered_volume),
        }

    @classmethod
    def from_json(cls, obj) -> "PAField":
        if not isinstance(obj, dict) or set(obj) != {"n", "cells", "domain", "covered_volume"}:
            raise ValueError("mesh must have exactly the keys n, cells, domain, covered_volume")
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError("n must be a positive integer")
        domain = BoxDomain.from_json(obj["domain"])
        if domain.n != n:
            raise ValueError("domain dimension does not match n")
        cells = [Cell.from_json(n, c) for c in obj["cells"]]
        return cls(n, cells, domain, parse_rational(obj["covered_volume"]))
