import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from roughiso.libs.exceptions import DomainMismatchError
from roughiso.libs.seeding import Seed
from roughiso.services.lattice import (
    axioms_hold,
    build_lattice,
    fkg_check,
    join,
    markov_closure_holds,
    meet,
    precedes,
)
from roughiso.services.pointsets import Mapping, PointSet
from roughiso.services.verify import MarkovConstants, RiConstants

from .strategies import ri_constants, rooted_sets


def _map(image, domain=(0, 1, 2), codomain=(0, 1, 2, 3)):
    return Mapping(domain, image, codomain)


def test_join_and_meet_are_pointwise():
    x, y = _map((0, 2, 2)), _map((0, 1, 3))
    assert join(x, y).image == (0, 2, 3)
    assert meet(x, y).image == (0, 1, 2)
    assert precedes(meet(x, y), x) and precedes(x, join(x, y))
    assert not precedes(x, y)


def test_axioms_on_a_triple():
    assert axioms_hold(_map((0, 2, 2)), _map((0, 1, 3)), _map((0, 0, 1)))


def test_shapes_must_agree():
    with pytest.raises(DomainMismatchError):
        join(_map((0, 1, 2)), _map((0, 1), domain=(0, 1)))


def test_two_element_lattice():
    A = PointSet((0, 1))
    lat = build_lattice(A, A, RiConstants(2, 1, 1))
    assert [T.image for T in lat.elements] == [(0, 0), (0, 1)]
    assert lat.minimum.image == (0, 0) and lat.maximum.image == (0, 1)
    assert lat.hasse_edges == [(0, 1)]
    assert fkg_check(lat, 0, 1) == 0
    assert lat.as_dict()["elements"] == [[0, 0], [0, 1]]


def test_empty_family_has_no_lattice():
    assert build_lattice(PointSet((0, 1)), PointSet((0, 1, 2)), RiConstants(1)) is None


def test_larger_lattice_is_positively_correlated():
    A = PointSet((0, 1, 2, 3))
    B = PointSet((0, 1, 2, 3, 4))
    lat = build_lattice(A, B, RiConstants(2, 1, 1))
    assert len(lat) > 2
    assert all(precedes(lat.minimum, T) and precedes(T, lat.maximum) for T in lat.elements)
    for i, j in lat.hasse_edges:
        assert precedes(lat.elements[i], lat.elements[j])
    for x in A.points:
        for y in A.points:
            assert fkg_check(lat, x, y) >= Fraction(0)


def test_markov_family_closure_on_a_small_instance():
    A = PointSet((0, 1))
    assert markov_closure_holds(A, A, MarkovConstants(2, 1, 1))


def test_uniform_samples_are_reproducible_elements():
    A = PointSet((0, 1, 2, 3))
    B = PointSet((0, 1, 2, 3, 4))
    lat = build_lattice(A, B, RiConstants(2, 1, 1))
    draws = lat.sample(Seed(11), 2000)
    assert [T.image for T in draws] == [T.image for T in lat.sample(Seed(11), 2000)]
    known = {T.image for T in lat.elements}
    assert all(T.image in known for T in draws)
    share = 1 / len(lat)
    top = sum(T.image == lat.maximum.image for T in draws) / len(draws)
    assert abs(top - share) < 4 * math.sqrt(share * (1 - share) / len(draws))


@settings(max_examples=60, deadline=None)
@given(A=rooted_sets(max_size=4, max_value=6), B=rooted_sets(max_size=5, max_value=8), c=ri_constants())
def test_coordinates_are_positively_correlated(A, B, c):
    lat = build_lattice(A, B, c)
    if lat is None:
        return
    for x in A.points:
        for y in A.points:
            assert fkg_check(lat, x, y) >= 0
