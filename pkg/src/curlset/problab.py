"""Sampling probes for the dimension obstructions on span{x ^ f(x)}.

Sample points come from the integer grid [-5, 5]^n and every evaluation is
exact, so a stable batch rank is a genuine rank of the sampled forms. The
result is still only a lower bound for the dimension of the full span: the
probes assert "final dimension != forbidden value", which is sound once the
true dimension has been reached.
"""
from __future__ import annotations

import enum
import json
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .exterior import KForm, eform, is_decomposable, wedge, wedge_all
from .rational import format_vector, parse_vector
from .setlab import FormSet, pairwise_rank_diff_le2, span_dim

GRID_BOUND = 5


class MapKind(str, enum.Enum):
    AFFINE = "affine"
    SHIFTED_PROJECTION = "shifted_projection"  # f(x) = x1 e^1 + e^2 on R^3
    CODIM_TWO = "codim_two"  # f into forms of degree n-2


class ProbeViolation(AssertionError):
    """A probe reached a forbidden dimension; carries the offending map."""

    def __init__(self, msg: str, spec: "MapSpec"):
        super().__init__(f"{msg}: {json.dumps(spec.to_json())}")
        self.spec = spec


@dataclass(frozen=True)
class MapSpec:
    """f: R^n -> forms of degree k.

    For the affine kind f(x) = matrix x + offset, where the matrix has one
    row per k-form coefficient (lexicographic basis) and n columns.
    """

    n: int
    k: int
    kind: MapKind = MapKind.AFFINE
    matrix: tuple[tuple[Fraction, ...], ...] = ()
    offset: tuple[Fraction, ...] = ()
    require_nonzero_offset: bool = False
    require_decomposable_offset: bool = False

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if self.kind is MapKind.AFFINE:
            m = comb(self.n, self.k)
            if len(self.matrix) != m or any(len(r) != self.n for r in self.matrix) or len(self.offset) != m:
                raise ValueError("affine map has the wrong shape")
            if self.require_nonzero_offset and not any(self.offset):
                raise ValueError("f(0) must be nonzero")
            if self.require_decomposable_offset and not _decomposable(KForm(self.n, self.k, self.offset)):
                raise ValueError("f(0) must be decomposable")
        elif self.kind is MapKind.SHIFTED_PROJECTION:
            if (self.n, self.k) != (3, 1):
                raise ValueError("this example lives on R^3 with vector values")
        elif self.kind is MapKind.CODIM_TWO:
            if self.n < 4 or self.k != self.n - 2:
                raise ValueError("this example needs n >= 4 and k = n - 2")

    @classmethod
    def affine(cls, matrix, offset, k: int = 1, **flags) -> "MapSpec":
        matrix = tuple(tuple(Fraction(x) for x in r) for r in matrix)
        offset = tuple(Fraction(x) for x in offset)
        n = len(matrix[0]) if matrix else len(offset)
        return cls(n, k, MapKind.AFFINE, matrix, offset, **flags)

    @classmethod
    def shifted_projection(cls) -> "MapSpec":
        return cls(3, 1, MapKind.SHIFTED_PROJECTION)

    @classmethod
    def codim_two(cls, n: int) -> "MapSpec":
        return cls(n, n - 2, MapKind.CODIM_TWO)

    def __call__(self, x: Sequence) -> KForm:
        x = [Fraction(v) for v in x]
        if len(x) != self.n:
            raise ValueError(f"point has {len(x)} coordinates, map lives on R^{self.n}")
        n = self.n
        if self.kind is MapKind.AFFINE:
            return KForm(n, self.k, tuple(sum(a * v for a, v in zip(r, x)) + c for r, c in zip(self.matrix, self.offset)))
        if self.kind is MapKind.SHIFTED_PROJECTION:
            return KForm(3, 1, (x[0], Fraction(1), Fraction(0)))
        head = tuple(range(1, n - 2))
        return eform(n, *head, n - 2) * (x[0] + 1) + eform(n, *head, n - 1) * x[1]

    def to_json(self) -> dict:
        obj = {"n": self.n, "k": self.k, "kind": self.kind.value}
        if self.kind is MapKind.AFFINE:
            obj["matrix"] = [format_vector(r) for r in self.matrix]
            obj["offset"] = format_vector(self.offset)
            obj["require_nonzero_offset"] = self.require_nonzero_offset
            obj["require_decomposable_offset"] = self.require_decomposable_offset
        return obj

    @classmethod
    def from_json(cls, obj) -> "MapSpec":
        kind = MapKind(obj["kind"])
        if kind is MapKind.AFFINE:
            return cls(
                obj["n"], obj["k"], kind,
                tuple(parse_vector(r) for r in obj["matrix"]), parse_vector(obj["offset"]),
                obj.get("require_nonzero_offset", False), obj.get("require_decomposable_offset", False),
            )
        return cls(obj["n"], obj["k"], kind)


def _decomposable(w: KForm) -> bool:
    return not w.is_zero() and is_decomposable(w)


def sample_wedge_map(spec: MapSpec, points: Sequence[Sequence]) -> list[KForm]:
    return [wedge(tuple(Fraction(v) for v in x), spec(x)) for x in points]


class _Span:
    """Incremental row echelon basis over the rationals."""

    def __init__(self):
        self.rows: dict[int, list[Fraction]] = {}

    def add(self, v: Sequence[Fraction]) -> bool:
        v = list(v)
        for p, r in self.rows.items():
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, r)]
        p = next((i for i, a in enumerate(v) if a), None)
        if p is None:
            return False
        c = v[p]
        v = [a / c for a in v]
        for q, r in self.rows.items():
            if r[p]:
                d = r[p]
                self.rows[q] = [a - d * b for a, b in zip(r, v)]
        self.rows[p] = v
        return True

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class ProbeResult:
    sample_counts: list[int]
    trajectory: list[int]
    stabilized: bool
    final_dim: int
    note: str = "lower bound: sampled forms span at least final_dim dimensions"

    def to_json(self) -> dict:
        return {
            "sample_counts": list(self.sample_counts),
            "trajectory": list(self.trajectory),
            "stabilized": self.stabilized,
            "final_dim": self.final_dim,
            "note": self.note,
        }

    @classmethod
    def from_json(cls, obj) -> "ProbeResult":
        return cls(list(obj["sample_counts"]), list(obj["trajectory"]), obj["stabilized"], obj["final_dim"], obj["note"])


def stabilized_span_dim(spec: MapSpec, batch_size: int = 64, max_batches: int = 20, seed: int = 0) -> ProbeResult:
    """Grow the span batch by batch until three consecutive batches agree."""
    if batch_size < spec.n:
        raise ValueError("batch size must be at least n")
    rng = random.Random(seed)
    span = _Span()
    full = comb(spec.n, spec.k + 1)
    counts, trajectory = [], []
    for _ in range(max_batches):
        pts = [[rng.randint(-GRID_BOUND, GRID_BOUND) for _ in range(spec.n)] for _ in range(batch_size)]
        for w in sample_wedge_map(spec, pts):
            if len(span) == full:
                break
            span.add(w.coeffs)
        counts.append(batch_size)
        trajectory.append(len(span))
        if len(trajectory) >= 3 and trajectory[-1] == trajectory[-2] == trajectory[-3]:
            return ProbeResult(counts, trajectory, True, trajectory[-1])
    return ProbeResult(counts, trajectory, False, trajectory[-1] if trajectory else 0)


def _trial_seeds(seed: int, trials: int) -> list[int]:
    master = random.Random(seed)
    return [master.getrandbits(63) for _ in range(trials)]


def _random_affine(rng: random.Random, n: int, k: int, offset: KForm, lo: int = -3, hi: int = 3) -> MapSpec:
    m = comb(n, k)
    matrix = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]
    return MapSpec.affine(matrix, offset.coeffs, k=k, require_nonzero_offset=True, require_decomposable_offset=True)


def _random_decomposable(rng: random.Random, n: int, k: int) -> KForm:
    while True:
        w = wedge_all([tuple(Fraction(rng.randint(-3, 3)) for _ in range(n)) for _ in range(k)], n)
        if not w.is_zero():
            return w


def _run(name: str, n: int, k: int, forbidden: int, trials: int, seed: int, batch_size: int, max_batches: int) -> dict:
    hist: Counter = Counter()
    unstable = 0
    for s in _trial_seeds(seed, trials):
        rng = random.Random(s)
        spec = _random_affine(rng, n, k, _random_decomposable(rng, n, k))
        res = stabilized_span_dim(spec, batch_size, max_batches, rng.getrandbits(63))
        if res.final_dim == forbidden:
            raise ProbeViolation(f"{name}: sampled span reached the forbidden dimension {forbidden}", spec)
        hist[res.final_dim] += 1
        unstable += not res.stabilized
    return {
        "probe": name,
        "n": n,
        "k": k,
        "forbidden_dim": forbidden,
        "trials": trials,
        "seed": seed,
        "histogram": {str(d): c for d, c in sorted(hist.items())},
        "unstabilized": unstable,
        "violations": 0,
        "note": "dimensions are sampled lower bounds; the probe checks final_dim != forbidden_dim",
    }


def vector_probe(n: int, trials: int = 100, seed: int = 0, batch_size: int = 64, max_batches: int = 20) -> dict:
    """Random affine f: R^n -> R^n with f(0) != 0; span{x ^ f(x)} must not have dimension n."""
    if n < 4:
        raise ValueError("the vector-valued obstruction needs n >= 4")
    return _run("vector", n, 1, n, trials, seed, batch_size, max_batches)


def form_probe(n: int, k: int, trials: int = 50, seed: int = 0, batch_size: int = 64, max_batches: int = 20) -> dict:
    """Random affine f into k-forms, f(0) decomposable and nonzero; the span must avoid n - k + 1."""
    if not 1 <= k <= n - 3:
        raise ValueError("need 1 <= k <= n - 3")
    return _run("forms", n, k, n - k + 1, trials, seed, batch_size, max_batches)


def _line_family(rng: random.Random, n: int) -> list[KForm]:
    """omega0 + x_i ^ b: pairwise differences (x_i - x_j) ^ b have rank <= 2."""
    w0 = KForm(n, 2, tuple(Fraction(rng.randint(-3, 3)) for _ in range(comb(n, 2))))
    b = tuple(Fraction(rng.randint(-3, 3)) for _ in range(n))
    return [w0 + wedge(tuple(Fraction(rng.randint(-3, 3)) for _ in range(n)), b) for _ in range(rng.randint(1, 2 * n))]


def _plane_family(rng: random.Random, n: int) -> list[KForm]:
    """omega0 + forms on a fixed 3-space: every 2-form there is decomposable."""
    w0 = KForm(n, 2, tuple(Fraction(rng.randint(-3, 3)) for _ in range(comb(n, 2))))
    basis = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(n)) for _ in range(3)]
    out = []
    for _ in range(rng.randint(1, 2 * n)):
        c = [rng.randint(-3, 3) for _ in range(3)]
        out.append(w0 + wedge(basis[0], basis[1]) * c[0] + wedge(basis[0], basis[2]) * c[1] + wedge(basis[1], basis[2]) * c[2])
    return out


def isotropy_probe(trials: int = 200, seed: int = 0, n: int = 4) -> dict:
    """Structured families with pairwise rank-2 differences; their span must have dimension <= n."""
    if n < 4:
        raise ValueError("need n >= 4")
    hist: Counter = Counter()
    for t, s in enumerate(_trial_seeds(seed, trials)):
        rng = random.Random(s)
        forms = (_line_family if t % 2 == 0 else _plane_family)(rng, n)
        forms = list(dict.fromkeys(forms))
        E = FormSet(n, tuple(forms))
        d = span_dim(E)
        if not pairwise_rank_diff_le2(E) or d > n:
            raise AssertionError(f"isotropy: family violates the bound: {json.dumps(E.to_json())}")
        hist[d] += 1
    return {
        "probe": "isotropy",
        "n": n,
        "trials": trials,
        "seed": seed,
        "histogram": {str(d): c for d, c in sorted(hist.items())},
        "violations": 0,
    }
