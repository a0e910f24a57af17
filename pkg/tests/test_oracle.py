from fractions import Fraction

import pytest

from roughiso.libs.exceptions import BudgetExceededError, NotFoundWithinBudgetError
from roughiso.services.oracle import (
    INFINITY,
    Family,
    SearchBudget,
    analytic_counterexample,
    counterexample_family,
    exists_general_ri,
    exists_increasing_ri,
    exists_markov_ri,
    minimal_multiplicative_constant,
)
from roughiso.services.pointsets import PointSet
from roughiso.services.verify import MarkovConstants, RiConstants, verify_rough_isometry


def test_markov_search_on_two_points():
    A, B = PointSet((0, 1)), PointSet((0, 5))
    assert exists_markov_ri(A, B, MarkovConstants(5)).image == (0, 5)
    assert exists_markov_ri(A, B, MarkovConstants(4)) is None


def test_unrooted_input_has_no_markov_map():
    A, B = PointSet((1, 2), rooted=False), PointSet((0, 1))
    assert exists_markov_ri(A, B, MarkovConstants(3, 3, 3)) is None


def test_minimal_markov_constant():
    A, B = PointSet((0, 1)), PointSet((0, 5))
    assert minimal_multiplicative_constant(A, B, Family.MARKOV) == 5
    assert minimal_multiplicative_constant(A, A, "markov") == 1


def test_minimal_constant_can_be_fractional():
    A, B = PointSet((0, 2)), PointSet((0, 3))
    assert minimal_multiplicative_constant(A, B, "increasing") == Fraction(3, 2)


def test_minimal_constant_is_infinite_without_density():
    A, B = PointSet((0, 1)), PointSet((0, 1, 2))
    assert minimal_multiplicative_constant(A, B, "increasing") == INFINITY


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_analytic_counterexamples(L):
    A, B, witness = analytic_counterexample(L)
    assert minimal_multiplicative_constant(A, B, "increasing") == L
    assert not witness.is_monotone()
    assert verify_rough_isometry(A, B, witness, RiConstants(3)) is None


def test_counterexample_search_for_one():
    A, B, witness = counterexample_family(1)
    assert A.points == B.points == (0, 1, 2, 3)
    assert witness.image == (0, 1, 3, 2)


def test_counterexample_search_for_two():
    A, B, witness = counterexample_family(2)
    assert len(A) == len(B) == 4
    assert minimal_multiplicative_constant(A, B, "increasing") == 2
    assert not witness.is_monotone()
    assert verify_rough_isometry(A, B, witness, RiConstants(3)) is None


def test_counterexample_search_gives_up():
    with pytest.raises(NotFoundWithinBudgetError):
        counterexample_family(10, SearchBudget(max_codomain_value=5))


def test_budget_limits():
    big = PointSet(tuple(range(21)))
    with pytest.raises(BudgetExceededError):
        exists_increasing_ri(big, big, RiConstants(1))
    A = PointSet(tuple(range(6)))
    with pytest.raises(BudgetExceededError):
        exists_increasing_ri(A, A, RiConstants(1), SearchBudget(max_nodes=3))
    with pytest.raises(ValueError):
        SearchBudget(max_nodes=0)


def test_budget_from_settings_applies_overrides():
    budget = SearchBudget.from_settings({"max_nodes": 5})
    assert budget.max_nodes == 5
    assert budget.max_domain_points == 20


def test_far_first_gap_blocks_every_rooted_map():
    A = PointSet(tuple(range(18)))
    B = PointSet((0, 31, 32))
    assert exists_general_ri(A, B, RiConstants(30, "1/2", 10), rooted=True) is None
    assert exists_general_ri(A, B, RiConstants(31, "1/2", 10), rooted=True) is not None
