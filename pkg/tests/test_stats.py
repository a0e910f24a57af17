import numpy as np
import pytest

from roughiso.libs.stats import (
    binomial_sigma,
    chi_square_fit,
    exact_binomial_interval,
    geometric_pmf,
    truncated_half_pmf,
)


def test_binomial_interval_covers_the_midpoint():
    low, high = exact_binomial_interval(5, 10)
    assert 0.0 < low < 0.5 < high < 1.0


def test_binomial_interval_edges():
    low, high = exact_binomial_interval(0, 20)
    assert low == 0.0 and high < 0.2
    low, high = exact_binomial_interval(20, 20)
    assert high == 1.0 and low > 0.8


def test_binomial_interval_needs_trials():
    with pytest.raises(ValueError):
        exact_binomial_interval(0, 0)


def test_binomial_sigma():
    assert binomial_sigma(0.5, 100) == pytest.approx(0.05)
    assert binomial_sigma(0.0, 100) == 0.0


def test_truncated_pmf_is_normalised():
    pmf = truncated_half_pmf(6)
    assert pmf(np.arange(1, 7)).sum() == pytest.approx(1.0)
    assert pmf(np.array([0, 7])).tolist() == [0.0, 0.0]


def test_chi_square_merges_sparse_bins():
    samples = np.array([1] * 50 + [2] * 25 + [3] * 12 + [4] * 6 + [5] * 3 + [6] * 2 + [9])
    fit = chi_square_fit(samples, geometric_pmf(0.5), 1)
    assert sum(fit.observed) == samples.size
    assert sum(fit.expected) == pytest.approx(samples.size)
    assert min(fit.expected) >= 5.0
    assert fit.pvalue > 0.05


def test_chi_square_rejects_values_below_support():
    with pytest.raises(ValueError):
        chi_square_fit(np.array([0, 1, 2]), geometric_pmf(0.5), 1)
