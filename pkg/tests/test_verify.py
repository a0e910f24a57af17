import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings

from roughiso.libs.exceptions import HorizonTooSmallError, PreconditionViolatedError
from roughiso.services.oracle import (
    brute_force_monotone,
    enumerate_general_ri,
    enumerate_increasing_ri,
    enumerate_markov_ri,
    exists_increasing_ri,
    exists_markov_ri,
)
from roughiso.services.pointsets import Mapping, PointSet
from roughiso.services.verify import (
    MarkovConstants,
    RiConstants,
    ViolationKind,
    big_gap_conclusion,
    event_Ew,
    exact_horizon,
    find_cut_point,
    increasing_to_markov_constants,
    l_min,
    markov_to_increasing_constants,
    restrict,
    verify_increasing,
    verify_markov,
    verify_rooted,
    verify_rough_isometry,
    window_restriction,
)
from roughiso.services.verify import _monotone_distortion_ok, _pair_scan

from .strategies import mapped_instances, markov_constants, ri_constants, rooted_sets


def _instance(A, B, image):
    A, B = PointSet(A), PointSet(B)
    return A, B, Mapping.between(A, B, image)


def test_identity_is_an_isometry():
    A = PointSet((0, 1, 3, 7))
    T = Mapping.identity(A)
    assert verify_rough_isometry(A, A, T, RiConstants(1)) is None
    assert verify_markov(A, A, T, MarkovConstants(1)) is None


def test_constants_below_one_are_normalised():
    assert RiConstants(Fraction(1, 2)).M == 1
    with pytest.raises(ValueError):
        RiConstants(0)
    with pytest.raises(ValueError):
        MarkovConstants(1, -1)


def test_distortion_high_and_boundary():
    A, B, T = _instance((0, 1), (0, 5), (0, 5))
    violation = verify_rough_isometry(A, B, T, RiConstants(4))
    assert violation.kind is ViolationKind.DISTORTION_HIGH
    assert violation.indices == (0, 1)
    assert verify_rough_isometry(A, B, T, RiConstants(5)) is None


def test_additive_constant_is_exact():
    A, B, T = _instance((0, 1), (0, 3), (0, 3))
    assert verify_rough_isometry(A, B, T, RiConstants(2, 1)) is None
    violation = verify_rough_isometry(A, B, T, RiConstants(2, "1/2"))
    assert violation.kind is ViolationKind.DISTORTION_HIGH


def test_distortion_low():
    A, B, T = _instance((0, 10), (0, 1), (0, 1))
    violation = verify_rough_isometry(A, B, T, RiConstants(2))
    assert violation.kind is ViolationKind.DISTORTION_LOW
    assert violation.witness == (0, 10)


def test_density_reports_the_stray_codomain_point():
    A, B, T = _instance((0, 1), (0, 1, 10), (0, 1))
    violation = verify_rough_isometry(A, B, T, RiConstants(1, 0, 1))
    assert violation.kind is ViolationKind.DENSITY
    assert violation.witness == (10,)
    assert violation.indices == (2,)


def test_non_monotone_map_is_scanned_pairwise():
    A, B, T = _instance((0, 1, 2, 3), (0, 1, 2, 3), (0, 3, 1, 2))
    assert verify_rough_isometry(A, B, T, RiConstants(3)) is None
    violation = verify_rough_isometry(A, B, T, RiConstants(2))
    assert violation.indices == (0, 1)


def test_rooted_check():
    A, B, T = _instance((0, 1), (0, 1), (1, 1))
    violation = verify_rooted(A, B, T, RiConstants(5, 5, 5))
    assert violation.kind is ViolationKind.NOT_ROOTED
    assert violation.indices == (0,)


def test_verify_increasing_reports_first_descent():
    _, _, T = _instance((0, 1, 2), (0, 1, 2), (0, 2, 1))
    violation = verify_increasing(T)
    assert violation.kind is ViolationKind.NOT_MONOTONE
    assert violation.witness == (2, 1)
    assert violation.indices == (2,)


@pytest.mark.parametrize(
    "A, B, image, constants, kind, indices",
    [
        ((0, 1), (0, 1), (1, 1), (1, 0, 0), ViolationKind.NOT_ROOTED, (0,)),
        ((0, 1, 2), (0, 1, 2), (0, 2, 1), (9, 9, 9), ViolationKind.NOT_MONOTONE, (2,)),
        ((0, 1), (0, 5), (0, 5), (4, 0, 0), ViolationKind.ADJACENCY_DISTORTION, (0, 1)),
        ((0, 1, 2, 3), (0, 1), (0, 0, 0, 1), (10, 1, 0), ViolationKind.FIBER_WIDTH, (0, 2)),
        ((0, 1), (0, 1, 10), (0, 1), (1, 0, 1), ViolationKind.DENSITY, (2,)),
    ],
)
def test_markov_violations_in_definition_order(A, B, image, constants, kind, indices):
    A, B, T = _instance(A, B, image)
    violation = verify_markov(A, B, T, MarkovConstants(*constants))
    assert violation.kind is kind
    assert violation.indices == indices


def test_fiber_witness_spans_the_fiber():
    A, B, T = _instance((0, 1, 2, 3), (0, 1), (0, 0, 0, 1))
    violation = verify_markov(A, B, T, MarkovConstants(10, 1, 0))
    assert violation.witness == (0, 2)
    assert verify_markov(A, B, T, MarkovConstants(10, 2, 0)) is None


def test_constant_conversions():
    assert markov_to_increasing_constants(MarkovConstants(3, 2, 1)) == RiConstants(7, "1/2", 1)
    assert increasing_to_markov_constants(RiConstants(2, 1, 3)) == MarkovConstants(5, 2, 3)


@settings(deadline=None, max_examples=60)
@given(A=rooted_sets(max_size=4, max_value=8), B=rooted_sets(max_size=4, max_value=8), mc=markov_constants())
def test_markov_maps_are_increasing_rough_isometries(A, B, mc):
    for T in enumerate_markov_ri(A, B, mc):
        assert verify_rooted(A, B, T, markov_to_increasing_constants(mc)) is None


@settings(deadline=None, max_examples=60)
@given(A=rooted_sets(max_size=4, max_value=8), B=rooted_sets(max_size=4, max_value=8), c=ri_constants())
def test_increasing_rough_isometries_are_markov(A, B, c):
    for T in enumerate_increasing_ri(A, B, c):
        assert verify_markov(A, B, T, increasing_to_markov_constants(c)) is None


@settings(deadline=None, max_examples=60)
@given(A=rooted_sets(max_size=4, max_value=8), B=rooted_sets(max_size=5, max_value=10), mc=markov_constants())
def test_markov_search_matches_brute_force(A, B, mc):
    expected = brute_force_monotone(A, B, lambda T: verify_markov(A, B, T, mc) is None)
    found = enumerate_markov_ri(A, B, mc)
    assert [T.image for T in found] == [T.image for T in expected]
    first = exists_markov_ri(A, B, mc)
    assert (first is None) == (not expected)
    if expected:
        assert first.image == expected[0].image


@settings(deadline=None, max_examples=60)
@given(A=rooted_sets(max_size=4, max_value=8), B=rooted_sets(max_size=5, max_value=10), c=ri_constants())
def test_increasing_search_matches_brute_force(A, B, c):
    expected = brute_force_monotone(A, B, lambda T: verify_rooted(A, B, T, c) is None)
    assert [T.image for T in enumerate_increasing_ri(A, B, c)] == [T.image for T in expected]
    first = exists_increasing_ri(A, B, c)
    assert (first is None) == (not expected)


@settings(deadline=None, max_examples=40)
@given(A=rooted_sets(max_size=4, max_value=6), B=rooted_sets(max_size=4, max_value=6), c=ri_constants())
def test_general_search_matches_brute_force(A, B, c):
    expected = []
    for picks in itertools.product(range(len(B)), repeat=len(A)):
        T = Mapping.between(A, B, tuple(B.points[j] for j in picks))
        if verify_rooted(A, B, T, c) is None:
            expected.append(T.image)
    found = [T.image for T in enumerate_general_ri(A, B, c, rooted=True)]
    assert found == expected


def _double_loop(T, c):
    n = len(T.domain)
    for i in range(n):
        for j in range(i + 1, n):
            d = T.domain[j] - T.domain[i]
            delta = abs(T.image[j] - T.image[i])
            if Fraction(d) / c.M - c.D > delta:
                return ViolationKind.DISTORTION_LOW, (T.domain[i], T.domain[j]), (i, j)
            if delta > c.M * d + c.D:
                return ViolationKind.DISTORTION_HIGH, (T.domain[i], T.domain[j]), (i, j)
    for index, b in enumerate(T.codomain):
        if min(abs(b - t) for t in T.image) > c.R:
            return ViolationKind.DENSITY, (b,), (index,)
    return None


@settings(deadline=None, max_examples=200)
@given(instance=mapped_instances(max_size=6, max_value=14, monotone=True), c=ri_constants())
def test_monotone_shortcut_agrees_with_pair_scan(instance, c):
    _, _, T = instance
    assert _monotone_distortion_ok(T, c) == (_pair_scan(T, c) is None)


@settings(deadline=None, max_examples=200)
@given(instance=mapped_instances(max_size=6, max_value=14), c=ri_constants())
def test_verifier_matches_a_double_loop(instance, c):
    A, B, T = instance
    found = verify_rough_isometry(A, B, T, c)
    expected = _double_loop(T, c)
    if expected is None:
        assert found is None
    else:
        assert found is not None
        assert (found.kind, tuple(found.witness), tuple(found.indices)) == expected


@settings(deadline=None, max_examples=200)
@given(instance=mapped_instances(max_size=6, max_value=14, monotone=True), c=ri_constants())
def test_verifier_matches_a_double_loop_on_monotone_maps(instance, c):
    A, B, T = instance
    found = verify_rough_isometry(A, B, T, c)
    expected = _double_loop(T, c)
    assert (found is None) == (expected is None)
    if found is not None:
        assert (found.kind, tuple(found.witness), tuple(found.indices)) == expected


def test_find_cut_point():
    A, B, T = _instance((0, 1, 2), (0, 3, 5), (5, 0, 3))
    assert find_cut_point(A, B, T) == 0
    A, B, T = _instance((0, 1, 2), (0, 3, 5), (3, 0, 5))
    assert find_cut_point(A, B, T) == 1


def test_restrict_cuts_the_codomain_at_the_top_image():
    A = PointSet((0, 1, 2, 3))
    T = Mapping.identity(A)
    A_n, B_m, T_n, c = restrict(A, A, T, 2, 1, RiConstants(1))
    assert A_n.points == (0, 1)
    assert B_m.points == (0, 1)
    assert T_n.image == (0, 1)
    assert c == RiConstants(1, 0, 1)
    with pytest.raises(PreconditionViolatedError):
        restrict(A, A, T, 2, 0, RiConstants(1))
    with pytest.raises(PreconditionViolatedError):
        restrict(A, A, T, 9, 1, RiConstants(1))


def test_window_restriction_translates_both_sides():
    A = PointSet((0, 1, 2, 3, 4))
    B = PointSet((0, 2, 4, 6, 8))
    T = Mapping.between(A, B, B.points)
    A_w, B_w, T_w = window_restriction(A, B, T, 1, 3)
    assert A_w.points == (0, 1, 2)
    assert B_w.points == (0, 2, 4)
    assert T_w.image == (0, 2, 4)


def test_restriction_can_expose_a_density_gap():
    A, B, T = _instance((0, 1, 2), (0, 3, 4, 5, 6), (0, 6, 3))
    c = RiConstants(6, 0, 1)
    assert verify_rough_isometry(A, B, T, c) is None

    A_n, B_m, T_n, c_n = restrict(A, B, T, 2, 2, c)
    assert B_m.points == B.points
    found = verify_rough_isometry(A_n, B_m, T_n, c_n)
    assert found is not None
    assert (found.kind, found.witness, found.indices) == (ViolationKind.DENSITY, (3,), (1,))

    assert verify_rough_isometry(*restrict(A, B, T, 2, 3, c)) is None


@settings(max_examples=200, deadline=None)
@given(instance=mapped_instances(max_size=6, max_value=14, monotone=True))
def test_cut_point_of_a_monotone_map_is_the_first_point(instance):
    A, B, T = instance
    assert find_cut_point(A, B, T) == min(A.points)


@settings(max_examples=60, deadline=None)
@given(A=rooted_sets(max_size=4, max_value=6), B=rooted_sets(max_size=5, max_value=8), c=ri_constants())
def test_windows_of_increasing_maps_stay_in_the_family(A, B, c):
    for T in enumerate_increasing_ri(A, B, c):
        assert verify_rooted(A, B, T, c) is None
        for i, x in enumerate(A.points):
            for y in A.points[i:]:
                A_w, B_w, T_w = window_restriction(A, B, T, x, y)
                assert verify_rooted(A_w, B_w, T_w, c) is None


def test_big_gap_predicates():
    assert l_min(2, 1) == 32
    A = PointSet((0, 1, 3, 4))
    assert exact_horizon(A, 0, 1) == 4

    B = PointSet((0, 1, 3, 4, 10, 11, 12, 13))
    assert exact_horizon(B, 0, 1) == 12
    assert event_Ew(B, 0, 0, 1, 4)
    assert event_Ew(B, 0, 16, 1, 4)
    assert not event_Ew(B, 0, 28, 1, 12)
    with pytest.raises(HorizonTooSmallError):
        event_Ew(B, 0, 28, 1, 4)
    with pytest.raises(HorizonTooSmallError):
        event_Ew(B, 0, 0, 1, 13)
    with pytest.raises(PreconditionViolatedError):
        event_Ew(B, 3, 0, 1, 1)


def test_negative_gap_event_needs_a_certified_horizon():
    A = PointSet((0, 1, 2, 5, 6))
    with pytest.raises(HorizonTooSmallError):
        event_Ew(A, 0, 8, 1, 1)
    assert event_Ew(A, 0, 8, 1, 4)


def test_big_gap_conclusion_finds_the_gap():
    A = PointSet((0, 1, 5))
    T = Mapping.between(A, PointSet((0, 1, 2)), (1, 0, 2))
    assert big_gap_conclusion(A, T, 0, 1, RiConstants(2), 1) == 1
    with pytest.raises(PreconditionViolatedError):
        big_gap_conclusion(A, T, 1, 0, RiConstants(2), 1)
