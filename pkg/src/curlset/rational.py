"""Rational scalars and their "p/q" string form.

``fractions.Fraction`` already keeps lowest terms with a positive
denominator, so it is the scalar type throughout the package.
"""
from __future__ import annotations

import re
from fractions import Fraction

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` or an int. Floats are refused since they are not exact."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise ValueError(f"not a rational: {value!r}")
    m = _RATIONAL_RE.match(value.replace("−", "-"))
    if not m:
        raise ValueError(f"not a rational: {value!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {value!r}")
    return Fraction(num, den)


def format_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_vector(v) -> list[str]:
    return [format_rational(x) for x in v]


def parse_vector(items) -> tuple[Fraction, ...]:
    if not isinstance(items, list):
        raise ValueError(f"expected a list of rationals, got {items!r}")
    return tuple(parse_rational(x) for x in items)
