import math
from fractions import Fraction

import numpy as np
import pytest

from roughiso.libs.exceptions import EmptyWindowError, PreconditionViolatedError
from roughiso.libs.seeding import Seed
from roughiso.libs.stats import chi_square_fit, geometric_pmf, truncated_half_pmf
from roughiso.services.processes import (
    couple_dominance,
    couple_poisson_percolation,
    coupling_cell,
    rescale_coupling,
    sample_bernoulli_rooted,
    sample_geom_shifted,
    sample_geom_truncated,
    sample_poisson,
    sample_with_initial_short_gaps,
)
from roughiso.services.verify import verify_rough_isometry


def test_bernoulli_is_rooted_and_reproducible(seed):
    A = sample_bernoulli_rooted(200, "1/2", seed)
    assert len(A) == 200 and A.points[0] == 0 and A.rooted
    assert A == sample_bernoulli_rooted(200, "1/2", seed)
    assert A != sample_bernoulli_rooted(200, "1/2", seed.child("other"))


def test_bernoulli_general_density(seed):
    A = sample_bernoulli_rooted(20001, "1/4", seed)
    assert abs(A.points[-1] / 20000 - 4.0) < 0.15


def test_bernoulli_rejects_bad_arguments(seed):
    with pytest.raises(ValueError):
        sample_bernoulli_rooted(10, "3/2", seed)
    with pytest.raises(PreconditionViolatedError):
        sample_bernoulli_rooted(0, "1/2", seed)


def test_geometric_helpers(seed):
    value = sample_geom_truncated(3, seed)
    assert isinstance(value, int) and 1 <= value <= 3
    values = sample_geom_shifted(7, seed, size=500)
    assert values.shape == (500,) and values.min() >= 8


def test_dominance_coupling_is_ordered(seed):
    x, y = couple_dominance(3, seed, size=5000)
    assert np.all(x <= y)
    assert x.max() <= 3
    assert np.array_equal(x[y <= 3], y[y <= 3])


def test_initial_short_gaps(seed):
    A = sample_with_initial_short_gaps(5, 3, 40, seed)
    assert len(A) == 40
    assert all(g <= 3 for g in A.gaps[:5])
    assert A.gaps[5] > 3
    with pytest.raises(PreconditionViolatedError):
        sample_with_initial_short_gaps(5, 3, 6, seed)


def test_poisson_points_are_dyadic(seed):
    P = sample_poisson(2, 10, seed)
    assert 0 < len(P) < 60
    assert all(0 < x <= 10 for x in P.points)
    assert all(x.denominator & (x.denominator - 1) == 0 for x in P.points)


def test_coupling_cell_width():
    assert float(coupling_cell(1, "1/2")) == pytest.approx(math.log(2))


def test_poisson_percolation_coupling_is_a_rough_isometry(seed):
    poisson, percolation, T, c = couple_poisson_percolation(1, "1/2", 64, seed)
    assert c.D == c.R == coupling_cell(1, "1/2")
    assert T.is_monotone()
    assert verify_rough_isometry(percolation, poisson, T, c) is None


def test_coupling_needs_a_complete_cell(seed):
    with pytest.raises(EmptyWindowError):
        couple_poisson_percolation(1, "1/2", "1/2", seed)


def test_rescaling_is_exact(seed):
    P = sample_poisson(2, 5, seed)
    image, T, c = rescale_coupling(2, 3, P)
    assert image.points == tuple(Fraction(2, 3) * x for x in P.points)
    assert c.M == Fraction(3, 2) and c.D == 0
    assert verify_rough_isometry(P, image, T, c) is None


def test_dominance_coupling_marginals():
    M = 3
    x, y = couple_dominance(M, Seed(41), size=6000)
    assert chi_square_fit(x, truncated_half_pmf(M), 1).pvalue > 1e-3
    assert chi_square_fit(y, geometric_pmf(0.5), 1).pvalue > 1e-3


def test_initial_short_gaps_laws():
    L, M = 6, 3
    head, tail = [], []
    for index in range(400):
        A = sample_with_initial_short_gaps(L, M, 60, Seed(43).child("laws", index))
        head.extend(A.gaps[:L])
        tail.extend(A.gaps[L + 1 :])
    assert chi_square_fit(np.array(head), truncated_half_pmf(M), 1).pvalue > 1e-3
    assert chi_square_fit(np.array(tail), geometric_pmf(0.5), 1).pvalue > 1e-3


@pytest.mark.parametrize("alpha, p", [(1, "1/2"), (3, "1/2"), ("1/2", "1/4")])
def test_poisson_percolation_coupling_across_seeds(alpha, p):
    for index in range(10):
        poisson, percolation, T, c = couple_poisson_percolation(alpha, p, 48, Seed(50 + index))
        assert T.is_monotone()
        assert verify_rough_isometry(percolation, poisson, T, c) is None


def test_rescaling_across_seeds():
    for index in range(10):
        P = sample_poisson(3, 20, Seed(60 + index))
        for gamma in (1, 2, 5, "7/3"):
            image, T, c = rescale_coupling(3, gamma, P)
            assert verify_rough_isometry(P, image, T, c) is None
