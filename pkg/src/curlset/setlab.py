"""Structure of a finite set E of 2-forms and the solvability verdict for curl eta in E.

The verdict follows a fixed decision table over exactly computed facts
(span dimension, pairwise wedge and rank conditions, a common line b with
E inside R^n ^ b, and whether 0 lies in the relative interior of co E).
Every positive claim carries a certificate that is re-checked exactly.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .exterior import KForm, Vector, cartan_divide, kernel_spaces, NotDivisible, rank_two_form, wedge
from .lp import linprog
from .rational import format_vector, parse_vector


class CertificateError(AssertionError):
    """A certificate failed its exact re-verification."""


class Verdict(str, enum.Enum):
    SOLVABLE_LINE = "SOLVABLE_LINE"
    SOLVABLE_COMPOSITE = "SOLVABLE_COMPOSITE"
    NO_SOLUTION_DIM_N = "NO_SOLUTION_DIM_N"
    INCONSISTENT_HYPOTHESES = "INCONSISTENT_HYPOTHESES"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class FormSet:
    """A finite set of distinct 2-forms on R^n, kept in the given order."""

    n: int
    elements: tuple[KForm, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if self.n < 2:
            raise ValueError("ambient dimension must be at least 2")
        if not elements:
            raise ValueError("E must be nonempty")
        for e in elements:
            if not isinstance(e, KForm) or e.k != 2 or e.n != self.n:
                raise ValueError(f"every element must be a 2-form on R^{self.n}: {e!r}")
        if len(set(elements)) != len(elements):
            raise ValueError("duplicate elements in E")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i) -> KForm:
        return self.elements[i]

    def subset(self, indices: Iterable[int]) -> "FormSet":
        return FormSet(self.n, tuple(self.elements[i] for i in indices))

    def index(self, e: KForm) -> int:
        return self.elements.index(e)

    def to_json(self) -> dict:
        return {"n": self.n, "elements": [e.to_json() for e in self.elements]}

    @classmethod
    def from_json(cls, obj) -> "FormSet":
        return cls(obj["n"], tuple(KForm.from_json(e) for e in obj["elements"]))


def _matrix(E: FormSet) -> list[list[Fraction]]:
    return [list(e.coeffs) for e in E]


def span_dim(E: FormSet) -> int:
    return linalg.rank(_matrix(E))


def pairwise_wedge_zero(E: FormSet) -> bool:
    els = E.elements
    return all(wedge(els[i], els[j]).is_zero() for i in range(len(els)) for j in range(i, len(els)))


def pairwise_rank_diff_le2(E: FormSet) -> bool:
    return all(rank_two_form(e - f) <= 2 for e, f in combinations(E.elements, 2))


def normalize_line(v: Sequence) -> Vector:
    """Scale so the first nonzero coordinate is 1."""
    v = tuple(Fraction(x) for x in v)
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        raise ValueError("zero vector has no direction")
    return tuple(x / lead for x in v)


def support_plane(e: KForm) -> list[Vector]:
    """Basis of ker{e}^perp."""
    return kernel_spaces(e)[1]


def common_line(E: FormSet) -> Vector | None:
    """The line b with E inside R^n ^ b, when the support planes meet in exactly one line."""
    if any(e.is_zero() for e in E):
        raise ValueError("E contains the zero form")
    meet = linalg.intersect_subspaces(*(support_plane(e) for e in E), n=E.n)
    if len(meet) != 1:
        return None
    b = normalize_line(meet[0])
    # the meet being a line is not enough by itself: check e = a ^ b directly
    for e in E:
        if rank_two_form(e) > 2 or not wedge(e, b).is_zero():
            return None
    return b


@dataclass(frozen=True)
class RicoCertificate:
    """Whether 0 lies in ri co E, with weights (yes) or a separating functional (no)."""

    verdict: bool
    weights: tuple[Fraction, ...] | None = None
    separator: KForm | None = None

    def check(self, E: FormSet) -> None:
        if self.verdict:
            w = self.weights
            if w is None or len(w) != len(E):
                raise CertificateError("missing weights")
            if sum(w) != 1 or min(w) <= 0:
                raise CertificateError("weights are not a strictly positive convex combination")
            total = KForm.zero(E.n, 2)
            for wi, e in zip(w, E):
                total = total + wi * e
            if not total.is_zero():
                raise CertificateError("weighted sum is not zero")
        else:
            m = self.separator
            if m is None or m.n != E.n or m.k != 2:
                raise CertificateError("missing separator")
            vals = [sum(x * y for x, y in zip(e.coeffs, m.coeffs)) for e in E]
            if min(vals) < 0 or max(vals) <= 0:
                raise CertificateError("separator inequalities fail")

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "weights": None if self.weights is None else format_vector(self.weights),
            "separator": None if self.separator is None else self.separator.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "RicoCertificate":
        return cls(
            bool(obj["verdict"]),
            None if obj.get("weights") is None else parse_vector(obj["weights"]),
            None if obj.get("separator") is None else KForm.from_json(obj["separator"]),
        )


def rico_membership(E: FormSet) -> RicoCertificate:
    """Decide 0 in ri co E by exact LP and return a checked certificate.

    For a finite set, ri co E is the set of strictly positive convex
    combinations of all elements. Maximize t subject to sum l_e e = 0,
    sum l_e = 1, l_e >= t; the answer is yes iff the optimum is positive.
    Otherwise Stiemke's alternative gives m with <e, m> >= 0 for all e and
    > 0 for some e, found by a second LP.
    """
    m, dim = len(E), len(E[0].coeffs)
    c = [0] * m + [1]
    a_eq = [[e.coeffs[r] for e in E] + [0] for r in range(dim)] + [[1] * m + [0]]
    b_eq = [0] * dim + [1]
    a_ub = [[-int(i == j) for j in range(m)] + [1] for i in range(m)]
    res = linprog(c, a_ub, [0] * m, a_eq, b_eq, maximize=True)
    if res.ok and res.objective > 0:
        cert = RicoCertificate(True, weights=tuple(res.x[:m]))
    else:
        sep = linprog(
            [0] * dim,
            [[-x for x in e.coeffs] for e in E],
            [0] * m,
            [[sum(e.coeffs[r] for e in E) for r in range(dim)]],
            [1],
            free=range(dim),
        )
        if not sep.ok:
            raise CertificateError("neither alternative is feasible")
        cert = RicoCertificate(False, separator=KForm(E.n, 2, tuple(sep.x)))
    cert.check(E)
    return cert


def line_solvable(E: FormSet) -> Vector | None:
    """b when E sits in R^n ^ b with dim span E = n-1 and 0 in ri co E, else None."""
    if any(e.is_zero() for e in E):
        return None
    b = common_line(E)
    if b is None or span_dim(E) != E.n - 1:
        return None
    if not rico_membership(E).verdict:
        return None
    return b


def candidate_lines(E: FormSet) -> list[Vector]:
    """Lines ker{e}^perp cap ker{f}^perp of independent rank-2 pairs with e ^ f = 0.

    Sorted in descending lexicographic order of the normalized coordinates, so
    e^1 precedes e^2.
    """
    found = set()
    planes = {}
    for i, e in enumerate(E):
        if not e.is_zero() and rank_two_form(e) == 2:
            planes[i] = support_plane(e)
    for i, j in combinations(sorted(planes), 2):
        e, f = E[i], E[j]
        if linalg.rank([e.coeffs, f.coeffs]) < 2 or not wedge(e, f).is_zero():
            continue
        meet = linalg.intersect_subspaces(planes[i], planes[j], n=E.n)
        if len(meet) == 1:
            found.add(normalize_line(meet[0]))
    return sorted(found, reverse=True)


def detect_two_partition(E: FormSet) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Split E into two line-solvable groups E1, E2 with E = E1 cup E2.

    Groups are maximal, {e : e ^ b = 0} for a candidate line b, so they may
    share elements (in the standard example both contain +-e^1^e^2). The first
    pair of candidates, in candidate order, whose groups cover E and are both
    line-solvable wins. A set that is already one group yields None.
    """
    lines = candidate_lines(E)
    everything = set(range(len(E)))
    groups = []
    for b in lines:
        g = tuple(i for i, e in enumerate(E) if wedge(e, b).is_zero())
        if set(g) == everything:
            return None
        groups.append((b, g))
    for (b1, g1), (b2, g2) in combinations(groups, 2):
        if set(g1) | set(g2) != everything:
            continue
        if line_solvable(E.subset(g1)) == b1 and line_solvable(E.subset(g2)) == b2:
            return g1, g2
    return None


def validate_hint(E: FormSet, hint) -> tuple[tuple[int, ...], ...]:
    """Parts must be nonempty, in range, free of repeats, and together cover E."""
    if not isinstance(hint, (list, tuple)) or len(hint) != 2:
        raise ValueError("partition hint must be two index lists")
    parts = []
    for part in hint:
        if not isinstance(part, (list, tuple)) or not part:
            raise ValueError("each part must be a nonempty index list")
        for i in part:
            if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < len(E):
                raise ValueError(f"index out of range: {i!r}")
        if len(set(part)) != len(part):
            raise ValueError("repeated index within a part")
        parts.append(tuple(part))
    if set(parts[0]) | set(parts[1]) != set(range(len(E))):
        raise ValueError("partition hint does not cover E")
    if set(parts[0]) == set(parts[1]):
        raise ValueError("partition hint parts coincide")
    return tuple(parts)


@dataclass
class ClassificationReport:
    n: int
    span_dim: int
    pairwise_wedge_zero: bool
    pairwise_rank_diff_le2: bool
    common_line: Vector | None
    rico: RicoCertificate
    verdict: Verdict
    partition: tuple[tuple[int, ...], ...] | None = None
    part_lines: tuple[Vector, ...] | None = None
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "span_dim": self.span_dim,
            "pairwise_wedge_zero": self.pairwise_wedge_zero,
            "pairwise_rank_diff_le2": self.pairwise_rank_diff_le2,
            "common_line": None if self.common_line is None else format_vector(self.common_line),
            "rico": self.rico.to_json(),
            "verdict": self.verdict.value,
            "partition": None if self.partition is None else [list(p) for p in self.partition],
            "part_lines": None if self.part_lines is None else [format_vector(b) for b in self.part_lines],
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, obj) -> "ClassificationReport":
        return cls(
            n=obj["n"],
            span_dim=obj["span_dim"],
            pairwise_wedge_zero=obj["pairwise_wedge_zero"],
            pairwise_rank_diff_le2=obj["pairwise_rank_diff_le2"],
            common_line=None if obj["common_line"] is None else parse_vector(obj["common_line"]),
            rico=RicoCertificate.from_json(obj["rico"]),
            verdict=Verdict(obj["verdict"]),
            partition=None if obj["partition"] is None else tuple(tuple(p) for p in obj["partition"]),
            part_lines=None if obj["part_lines"] is None else tuple(parse_vector(b) for b in obj["part_lines"]),
            notes=list(obj["notes"]),
        )


def classify(E: FormSet, partition_hint=None) -> ClassificationReport:
    """Solvability of curl eta in E with every element on positive measure and nonzero integral."""
    n = E.n
    hint = validate_hint(E, partition_hint) if partition_hint is not None else None
    notes: list[str] = []
    dim = span_dim(E)
    wz = pairwise_wedge_zero(E)
    rd = pairwise_rank_diff_le2(E)
    has_zero = any(e.is_zero() for e in E)
    line = None
    if has_zero:
        notes.append("E contains 0; the common-line test assumes nonzero elements and was skipped")
    else:
        line = common_line(E)
    rico = rico_membership(E)
    report = ClassificationReport(n, dim, wz, rd, line, rico, Verdict.UNKNOWN, notes=notes)

    if dim == n and n >= 4:
        report.verdict = Verdict.NO_SOLUTION_DIM_N
        notes.append(
            "dim span E = n with n >= 4: no W0^{1,inf} solution attains every element on positive "
            "measure with nonzero integral"
        )
        return report
    if rd and dim >= n + 1:
        report.verdict = Verdict.INCONSISTENT_HYPOTHESES
        notes.append("pairwise rank[e-f] <= 2 forces dim span E <= n, yet dim span E >= n+1")
        return report
    if line is not None and dim == n - 1 and rico.verdict:
        report.verdict = Verdict.SOLVABLE_LINE
        notes.append(
            "E lies in R^n ^ b with dim span E = n-1 and 0 in ri co E: a piecewise affine "
            "eta = u b solves the inclusion"
        )
        return report

    parts = None
    if hint is not None:
        lines = [line_solvable(E.subset(p)) for p in hint]
        if all(b is not None for b in lines):
            parts = hint
        else:
            notes.append("partition hint rejected: not every part is line-solvable")
    if parts is None and not has_zero:
        parts = detect_two_partition(E)
    if parts is not None:
        report.verdict = Verdict.SOLVABLE_COMPOSITE
        report.partition = tuple(parts)
        report.part_lines = tuple(line_solvable(E.subset(p)) for p in parts)
        notes.append(
            "E = E1 cup E2 with each part line-solvable: solutions on two halves of a box glue "
            "since both vanish on the interface"
        )
        return report

    if line is None and dim == n - 1 and n == 4 and wz:
        notes.append("n = 4 with dim span E = 3 and pairwise zero wedges need not lie in R^4 ^ b; left open")
    if line is not None and dim == n - 1 and not rico.verdict:
        notes.append("0 is not in ri co E, which any solution with every element attained requires")
    if dim < n - 1:
        notes.append("dim span E < n-1")
    if rd and dim == n and n < 4:
        notes.append("dim span E = n with n <= 3 is outside the dimension obstruction")
    return report
