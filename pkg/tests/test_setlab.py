import random
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import random_form, random_vector
from oracles import rank_gauss
from curlset import linalg
from curlset.catalog import full_span_set, line_set, shifted_fan_set, three_plane_set, two_line_set
from curlset.exterior import KForm, eform, kernel_spaces, unit, vector, wedge
from curlset.setlab import (
    ClassificationReport,
    FormSet,
    RicoCertificate,
    Verdict,
    classify,
    common_line,
    detect_two_partition,
    line_solvable,
    pairwise_rank_diff_le2,
    pairwise_wedge_zero,
    rico_membership,
    span_dim,
    validate_hint,
)


def test_formset_validation():
    with pytest.raises(ValueError):
        FormSet(4, ())
    with pytest.raises(ValueError):
        FormSet(4, (eform(4, 1, 2), eform(4, 1, 2)))
    with pytest.raises(ValueError):
        FormSet(4, (eform(4, 1, 2, 3),))
    with pytest.raises(ValueError):
        FormSet(4, (eform(3, 1, 2),))


def test_span_dim_examples():
    assert span_dim(three_plane_set()) == 3
    assert span_dim(FormSet(4, (eform(4, 1, 2), 2 * eform(4, 1, 2)))) == 1
    E, _ = two_line_set(4)
    assert span_dim(E) == 5 == 2 * 4 - 3
    assert len(E) == 4 * 4 - 6


def test_pairwise_wedge_zero_examples():
    assert pairwise_wedge_zero(FormSet(4, (eform(4, 1, 2), eform(4, 1, 3))))
    assert not pairwise_wedge_zero(FormSet(4, (eform(4, 1, 2), eform(4, 3, 4))))
    E = shifted_fan_set(5)
    assert not pairwise_wedge_zero(E)
    assert not wedge(E[1], E[3]).is_zero()


def test_pairwise_rank_diff_examples():
    assert pairwise_rank_diff_le2(shifted_fan_set(5))
    assert not pairwise_rank_diff_le2(FormSet(4, (eform(4, 1, 2), eform(4, 3, 4))))
    assert pairwise_rank_diff_le2(FormSet(4, (eform(4, 1, 2) + eform(4, 3, 4),)))


def test_common_line_examples():
    assert common_line(line_set(5)) == unit(5, 1)
    assert common_line(three_plane_set()) is None
    assert common_line(shifted_fan_set(5)) is None
    with pytest.raises(ValueError):
        common_line(FormSet(3, (KForm.zero(3, 2), eform(3, 1, 2))))


def test_common_line_is_normalized():
    b = vector(2, 4, 0, -2)
    E = FormSet(4, (wedge(unit(4, 2), b), wedge(unit(4, 3), b), wedge(unit(4, 4), b)))
    assert common_line(E) == vector(1, 2, 0, -1)


def test_rico_examples():
    E = FormSet(3, (eform(3, 1, 2), -eform(3, 1, 2)))
    cert = rico_membership(E)
    assert cert.verdict and cert.weights == (Fraction(1, 2), Fraction(1, 2))
    cert = rico_membership(FormSet(3, (eform(3, 1, 2),)))
    assert not cert.verdict and cert.separator is not None
    E = FormSet(3, (eform(3, 1, 2), eform(3, 1, 3), -(eform(3, 1, 2) + eform(3, 1, 3))))
    cert = rico_membership(E)
    assert cert.verdict and cert.weights == (Fraction(1, 3),) * 3


def test_rico_boundary_point_is_not_relative_interior():
    # 0 is in co E but only on a face: weights on e3 must vanish
    E = FormSet(3, (eform(3, 1, 2), -eform(3, 1, 2), eform(3, 1, 3)))
    cert = rico_membership(E)
    assert not cert.verdict
    vals = [sum(x * y for x, y in zip(e.coeffs, cert.separator.coeffs)) for e in E]
    assert vals[2] > 0 and vals[0] == vals[1] == 0


def test_certificate_check_rejects_forgery():
    E = FormSet(3, (eform(3, 1, 2), -eform(3, 1, 2)))
    with pytest.raises(AssertionError):
        RicoCertificate(True, weights=(Fraction(1, 3), Fraction(2, 3))).check(E)
    with pytest.raises(AssertionError):
        RicoCertificate(False, separator=eform(3, 1, 2)).check(E)


def test_classify_examples():
    assert classify(line_set(5)).verdict == Verdict.SOLVABLE_LINE
    assert classify(line_set(5)).common_line == unit(5, 1)
    assert classify(full_span_set()).verdict == Verdict.NO_SOLUTION_DIM_N
    E, hint = two_line_set(4)
    rep = classify(E, partition_hint=[list(hint[0]), list(hint[1])])
    assert rep.verdict == Verdict.SOLVABLE_COMPOSITE
    assert rep.part_lines == (unit(4, 1), unit(4, 2))


def test_classify_unknown_cases():
    rep = classify(three_plane_set())
    assert rep.verdict == Verdict.UNKNOWN and rep.span_dim == 3 and rep.common_line is None
    rep = classify(shifted_fan_set(5))
    assert rep.verdict == Verdict.UNKNOWN


def test_classify_inconsistent_hypotheses():
    # any family with pairwise rank differences <= 2 has span <= n; build one
    # by hand that violates it only if the kernel were wrong
    E = FormSet(3, (eform(3, 1, 2), eform(3, 1, 3), eform(3, 2, 3), KForm.zero(3, 2)))
    rep = classify(E)
    assert rep.pairwise_rank_diff_le2 and rep.span_dim == 3
    assert rep.verdict != Verdict.INCONSISTENT_HYPOTHESES
    assert any("contains 0" in s for s in rep.notes)


def test_classify_zero_in_set_flagged():
    E = FormSet(4, (KForm.zero(4, 2), eform(4, 1, 2)))
    rep = classify(E)
    assert rep.common_line is None and rep.verdict == Verdict.UNKNOWN


def test_hint_validation():
    E, hint = two_line_set(4)
    with pytest.raises(ValueError):
        classify(E, partition_hint=[[0, 1], [99]])
    with pytest.raises(ValueError):
        classify(E, partition_hint=[[0, 0, 1], list(range(len(E)))])
    with pytest.raises(ValueError):
        validate_hint(E, [[0], [1]])


def test_detect_two_partition_examples():
    E, hint = two_line_set(4)
    assert detect_two_partition(E) == hint
    assert detect_two_partition(line_set(5)) is None
    assert detect_two_partition(three_plane_set()) is None


def test_no_cover_of_three_plane_set_is_line_solvable():
    # exhaustive over all pairs of subsets covering E
    E = three_plane_set()
    idx = range(len(E))
    subsets = [s for r in range(1, 4) for s in combinations(idx, r)]
    for s1, s2 in combinations(subsets, 2):
        if set(s1) | set(s2) == set(idx):
            assert line_solvable(E.subset(s1)) is None or line_solvable(E.subset(s2)) is None


def test_classify_permutation_invariant(rng):
    for E in (line_set(4), three_plane_set(), full_span_set(), two_line_set(4)[0], shifted_fan_set(5)):
        base = classify(E).verdict
        for _ in range(3):
            els = list(E.elements)
            rng.shuffle(els)
            assert classify(FormSet(E.n, tuple(els))).verdict == base


def test_report_roundtrip():
    E, hint = two_line_set(4)
    rep = classify(E, partition_hint=[list(h) for h in hint])
    assert ClassificationReport.from_json(rep.to_json()) == rep
    rep = classify(FormSet(3, (eform(3, 1, 2),)))
    assert ClassificationReport.from_json(rep.to_json()) == rep


# --- structural properties --------------------------------------------------------


def _dim_meet(*bases, n):
    return len(linalg.intersect_subspaces(*bases, n=n))


def test_independent_rank_two_pairs_with_zero_wedge(rng):
    checked = 0
    while checked < 200:
        n = rng.randint(5, 8)
        x, y, z = (random_vector(rng, n) for _ in range(3))
        w1 = wedge(x, y)
        alpha, beta = rng.randint(-3, 3), rng.randint(-3, 3)
        w2 = wedge(tuple(alpha * a + beta * b for a, b in zip(x, y)), z)
        if w1.is_zero() or w2.is_zero() or rank_gauss([w1.coeffs, w2.coeffs]) < 2:
            continue
        assert wedge(w1, w2).is_zero()
        k1, p1 = kernel_spaces(w1)
        k2, p2 = kernel_spaces(w2)
        assert _dim_meet(p1, p2, n=n) == 1
        assert _dim_meet(k1, k2, n=n) == n - 3
        checked += 1


def test_lifted_family_is_independent(rng):
    checked = 0
    while checked < 200:
        n = rng.randint(3, 7)
        b = random_vector(rng, n)
        if not any(b):
            continue
        m = rng.randint(1, n - 1)
        xs = [random_vector(rng, n) for _ in range(m)]
        if rank_gauss([wedge(x, b).coeffs for x in xs]) < m:
            continue
        assert rank_gauss([b] + xs) == m + 1
        checked += 1


@pytest.mark.parametrize("n", [4, 5, 6])
def test_structured_families_span_at_most_n(rng, n):
    for _ in range(60):
        w0 = random_form(rng, n, 2)
        b = random_vector(rng, n)
        E = {w0 + wedge(random_vector(rng, n), b) for _ in range(rng.randint(1, 2 * n))}
        E = FormSet(n, tuple(E))
        assert pairwise_rank_diff_le2(E)
        assert span_dim(E) <= n


def test_rico_certificates_random(rng):
    for _ in range(30):
        n = rng.randint(3, 4)
        m = rng.randint(1, 6)
        E = {random_form(rng, n, 2, lo=-2, hi=2) for _ in range(m)}
        if rng.random() < 0.5:
            E |= {-e for e in list(E)}
        E.discard(KForm.zero(n, 2))
        if not E:
            continue
        cert = rico_membership(FormSet(n, tuple(E)))
        cert.check(FormSet(n, tuple(E)))
