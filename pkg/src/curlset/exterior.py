"""Exact exterior algebra of R^n.

A k-form is stored as its coefficient vector in the basis
``e^{i_1} ^ ... ^ e^{i_k}`` with ``i_1 < ... < i_k`` taken in lexicographic
order (``itertools.combinations`` order). Indices are 0-based internally;
:func:`eform` takes the 1-based indices used in mathematical notation.

The standard basis is declared orthonormal, which fixes the scalar product,
the norm and the Hodge star.

Degrees above ``n`` are allowed and give the zero form with an empty
coefficient vector, so ``wedge`` is total.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from . import linalg
from .rational import format_vector, parse_vector

Vector = tuple[Fraction, ...]


class NotDivisible(ValueError):
    """Raised by :func:`cartan_divide` when ``e`` is not of the form ``a ^ b``."""


@lru_cache(maxsize=None)
def basis_indices(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    if k < 0:
        raise ValueError("negative degree")
    if k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def _index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {idx: i for i, idx in enumerate(basis_indices(n, k))}


def _merge_sign(a: Sequence[int], b: Sequence[int]) -> int:
    """Sign of the permutation sorting the concatenation a + b (both sorted, disjoint)."""
    inversions = 0
    for x in a:
        for y in b:
            if x > y:
                inversions += 1
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class KForm:
    n: int
    k: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if self.n < 0 or self.k < 0:
            raise ValueError("negative dimension or degree")
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if len(coeffs) != comb(self.n, self.k):
            raise ValueError(
                f"a {self.k}-form on R^{self.n} needs {comb(self.n, self.k)} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, n: int, k: int) -> "KForm":
        return cls(n, k, (Fraction(0),) * comb(n, k))

    @classmethod
    def from_vector(cls, v: Iterable) -> "KForm":
        v = tuple(Fraction(x) for x in v)
        return cls(len(v), 1, v)

    @classmethod
    def scalar(cls, n: int, c) -> "KForm":
        return cls(n, 0, (Fraction(c),))

    @classmethod
    def from_dict(cls, n: int, k: int, entries: dict) -> "KForm":
        """Build from ``{(i_1, ..., i_k): c}`` with 0-based, not necessarily sorted indices."""
        out = [Fraction(0)] * comb(n, k)
        idx = _index(n, k)
        for key, c in entries.items():
            if len(set(key)) != len(key):
                continue
            order = sorted(range(len(key)), key=lambda i: key[i])
            sign = _perm_sign(order)
            out[idx[tuple(sorted(key))]] += sign * Fraction(c)
        return cls(n, k, tuple(out))

    def as_vector(self) -> Vector:
        if self.k != 1:
            raise ValueError("only 1-forms convert to vectors")
        return self.coeffs

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def items(self):
        """Nonzero (multi-index, coefficient) pairs."""
        return [(idx, c) for idx, c in zip(basis_indices(self.n, self.k), self.coeffs) if c]

    def _check(self, other: "KForm") -> None:
        if not isinstance(other, KForm):
            raise TypeError(f"expected KForm, got {type(other).__name__}")
        if self.n != other.n:
            raise ValueError(f"ambient dimension mismatch: {self.n} vs {other.n}")
        if self.k != other.k:
            raise ValueError(f"degree mismatch: {self.k} vs {other.k}")

    def __add__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.n, self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "KForm") -> "KForm":
        self._check(other)
        return KForm(self.n, self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "KForm":
        return KForm(self.n, self.k, tuple(-a for a in self.coeffs))

    def __mul__(self, c) -> "KForm":
        c = Fraction(c)
        return KForm(self.n, self.k, tuple(c * a for a in self.coeffs))

    __rmul__ = __mul__

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __repr__(self) -> str:
        if self.is_zero():
            return f"KForm(0; n={self.n}, k={self.k})"
        terms = []
        for idx, c in self.items():
            name = "^".join(f"e{i + 1}" for i in idx) or "1"
            terms.append(f"{c}*{name}")
        return " + ".join(terms)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "coeffs": format_vector(self.coeffs)}

    @classmethod
    def from_json(cls, obj) -> "KForm":
        if not isinstance(obj, dict) or set(obj) != {"n", "k", "coeffs"}:
            raise ValueError(f"a k-form must be an object with exactly n, k, coeffs: {obj!r}")
        n, k = obj["n"], obj["k"]
        if not isinstance(n, int) or not isinstance(k, int) or isinstance(n, bool) or isinstance(k, bool):
            raise ValueError("n and k must be integers")
        return cls(n, k, parse_vector(obj["coeffs"]))


def _perm_sign(order: Sequence[int]) -> int:
    sign = 1
    seen = list(order)
    for i in range(len(seen)):
        for j in range(i + 1, len(seen)):
            if seen[i] > seen[j]:
                sign = -sign
    return sign


def eform(n: int, *indices: int) -> KForm:
    """Basis form e^{i_1} ^ ... ^ e^{i_k} with 1-based indices, e.g. ``eform(4, 1, 2)``."""
    key = tuple(i - 1 for i in indices)
    if any(not 0 <= i < n for i in key):
        raise ValueError(f"index out of range for n={n}: {indices}")
    return KForm.from_dict(n, len(key), {key: 1})


def vector(*coords) -> Vector:
    return tuple(Fraction(c) for c in coords)


def unit(n: int, i: int) -> Vector:
    """The 1-based standard basis vector e^i of R^n."""
    return tuple(Fraction(int(j == i - 1)) for j in range(n))


def as_form(x) -> KForm:
    return x if isinstance(x, KForm) else KForm.from_vector(x)


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int, q: int) -> tuple[tuple[int, int, int, int], ...]:
    out_idx = _index(n, p + q)
    table = []
    for i, a in enumerate(basis_indices(n, p)):
        sa = set(a)
        for j, b in enumerate(basis_indices(n, q)):
            if sa.isdisjoint(b):
                table.append((i, j, out_idx[tuple(sorted(a + b))], _merge_sign(a, b)))
    return tuple(table)


def wedge(a, b) -> KForm:
    """Exterior product; vectors are accepted as 1-forms."""
    a, b = as_form(a), as_form(b)
    if a.n != b.n:
        raise ValueError(f"ambient dimension mismatch: {a.n} vs {b.n}")
    n, p, q = a.n, a.k, b.k
    if p + q > n:
        return KForm(n, p + q, ())
    out = [Fraction(0)] * comb(n, p + q)
    ac, bc = a.coeffs, b.coeffs
    for i, j, r, s in _wedge_table(n, p, q):
        x, y = ac[i], bc[j]
        if x and y:
            out[r] += s * x * y
    return KForm(n, p + q, tuple(out))


def wedge_all(forms: Iterable, n: int | None = None) -> KForm:
    forms = [as_form(f) for f in forms]
    if not forms:
        if n is None:
            raise ValueError("n required for an empty product")
        return KForm.scalar(n, 1)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


@lru_cache(maxsize=None)
def _interior_table(n: int, k: int) -> tuple[tuple[int, int, int, int], ...]:
    # v _| e^I = sum_r (-1)^r v_{I_r} e^{I without I_r}   (r 0-based)
    out_idx = _index(n, k - 1)
    table = []
    for j, idx in enumerate(basis_indices(n, k)):
        for r, i in enumerate(idx):
            rest = idx[:r] + idx[r + 1 :]
            table.append((i, j, out_idx[rest], -1 if r % 2 else 1))
    return tuple(table)


def interior(v, w: KForm) -> KForm:
    """Interior product v _| w, the adjoint of v ^ (.) for the scalar product."""
    v = tuple(Fraction(x) for x in (v.as_vector() if isinstance(v, KForm) else v))
    if len(v) != w.n:
        raise ValueError(f"vector has length {len(v)}, form lives on R^{w.n}")
    if w.k == 0:
        raise ValueError("interior product of a 0-form is undefined")
    if w.k > w.n:
        return KForm(w.n, w.k - 1, ()) if w.k - 1 > w.n else KForm.zero(w.n, w.k - 1)
    out = [Fraction(0)] * comb(w.n, w.k - 1)
    wc = w.coeffs
    for i, j, r, s in _interior_table(w.n, w.k):
        x, y = v[i], wc[j]
        if x and y:
            out[r] += s * x * y
    return KForm(w.n, w.k - 1, tuple(out))


def inner(a, b) -> Fraction:
    a, b = as_form(a), as_form(b)
    a._check(b)
    return sum((x * y for x, y in zip(a.coeffs, b.coeffs)), Fraction(0))


def norm2(a) -> Fraction:
    return inner(a, a)


def hodge(w: KForm) -> KForm:
    """Hodge star for the standard orientation: a ^ *b = <a, b> e^1 ^ ... ^ e^n."""
    n, k = w.n, w.k
    out = [Fraction(0)] * comb(n, n - k)
    idx = _index(n, n - k)
    for I, c in w.items():
        comp = tuple(i for i in range(n) if i not in I)
        out[idx[comp]] += _merge_sign(I, comp) * c
    return KForm(n, n - k, tuple(out))


def volume_form(n: int) -> KForm:
    return KForm(n, n, (Fraction(1),))


def skew_matrix(w: KForm) -> list[list[Fraction]]:
    """M[i][j] = coefficient of e^i ^ e^j for i < j, antisymmetric."""
    if w.k != 2:
        raise ValueError("skew matrix needs a 2-form")
    m = [[Fraction(0)] * w.n for _ in range(w.n)]
    for (i, j), c in w.items():
        m[i][j] = c
        m[j][i] = -c
    return m


def from_skew(m: Sequence[Sequence]) -> KForm:
    n = len(m)
    for i in range(n):
        if m[i][i] != 0 or any(m[i][j] != -m[j][i] for j in range(n)):
            raise ValueError("matrix is not antisymmetric")
    return KForm(n, 2, tuple(Fraction(m[i][j]) for i, j in basis_indices(n, 2)))


def rank_two_form(w: KForm) -> int:
    """2p where p is the largest power with w^p != 0."""
    if w.k != 2:
        raise ValueError("rank is computed for 2-forms")
    p = 0
    power = KForm.scalar(w.n, 1)
    while True:
        nxt = wedge(power, w)
        if nxt.is_zero():
            return 2 * p
        p += 1
        power = nxt


def kernel_spaces(w: KForm) -> tuple[list[Vector], list[Vector]]:
    """Bases of ker{w} = {v : v _| w = 0} and of its orthogonal complement."""
    if w.k != 2:
        raise ValueError("kernel spaces are defined here for 2-forms")
    m = skew_matrix(w)
    ker = [tuple(v) for v in linalg.nullspace(m)]
    # ker(M)^perp = row space of M
    perp = [tuple(v) for v in linalg.row_space(m)]
    return ker, perp


def annihilator(w: KForm) -> list[Vector]:
    """Basis of {v : v ^ w = 0}."""
    n = w.n
    cols = [wedge(unit(n, i + 1), w).coeffs for i in range(n)]
    if not cols or not cols[0]:
        return [unit(n, i + 1) for i in range(n)]
    rows = [[cols[i][r] for i in range(n)] for r in range(len(cols[0]))]
    return [tuple(v) for v in linalg.nullspace(rows, n_cols=n)]


def is_decomposable(w: KForm) -> bool:
    """Plücker test: (e_J _| w) ^ w = 0 for every basis (k-1)-vector e_J."""
    if w.k <= 1 or w.k >= w.n - 1 or w.is_zero():
        # every 0-, 1-, (n-1)- and n-form is decomposable
        return True
    n = w.n
    for J in basis_indices(n, w.k - 1):
        c = w
        for i in reversed(J):
            c = interior(unit(n, i + 1), c)
        if not wedge(c, w).is_zero():
            return False
    return True


def cartan_divide(e: KForm, b) -> Vector:
    """The unique a orthogonal to b with a ^ b = e.

    Raises NotDivisible when e does not lie in R^n ^ b.
    """
    b = tuple(Fraction(x) for x in b)
    if e.k != 2:
        raise ValueError("cartan_divide expects a 2-form")
    if len(b) != e.n:
        raise ValueError("dimension mismatch")
    bb = sum(x * x for x in b)
    if bb == 0:
        raise ValueError("b must be nonzero")
    if not wedge(e, b).is_zero() or rank_two_form(e) > 2:
        raise NotDivisible(f"{e!r} is not divisible by {b}")
    c = interior(b, e).coeffs
    # b _| (a ^ b) = <a,b> b - |b|^2 a, so for a orthogonal to b: a = -(b _| e)/|b|^2
    cb = sum(x * y for x, y in zip(c, b))
    return tuple(-(ci - cb * bi / bb) / bb for ci, bi in zip(c, b))
