"""Statistical checks used by the Monte-Carlo harness and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    pvalue: float
    observed: tuple[int, ...]
    expected: tuple[float, ...]


def exact_binomial_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> tuple[float, float]:
    """Clopper-Pearson interval for a binomial proportion."""

    if trials < 1:
        raise ValueError("trials must be positive")
    result = stats.binomtest(successes, trials)
    interval = result.proportion_ci(confidence_level=confidence, method="exact")
    return float(interval.low), float(interval.high)


def binomial_sigma(probability: float, trials: int) -> float:
    return math.sqrt(max(probability * (1.0 - probability), 0.0) / trials)


def _merge_bins(
    observed: list[int], expected: list[float]
) -> tuple[list[int], list[float]]:
    merged_obs: list[int] = []
    merged_exp: list[float] = []
    run_obs, run_exp = 0, 0.0
    for obs, exp in zip(observed, expected):
        run_obs += obs
        run_exp += exp
        if run_exp >= MIN_EXPECTED:
            merged_obs.append(run_obs)
            merged_exp.append(run_exp)
            run_obs, run_exp = 0, 0.0
    if run_exp > 0.0 or run_obs:
        if merged_obs:
            merged_obs[-1] += run_obs
            merged_exp[-1] += run_exp
        else:
            merged_obs.append(run_obs)
            merged_exp.append(run_exp)
    return merged_obs, merged_exp


def chi_square_fit(
    samples: np.ndarray,
    pmf: Callable[[np.ndarray], np.ndarray],
    support_min: int,
) -> ChiSquareResult:
    """Goodness of fit of integer samples against a discrete law.

    The support is cut at the largest observed value; the mass above it is
    folded into the last bin and sparse bins are merged until every expected
    count reaches five.
    """

    values = np.asarray(samples, dtype=np.int64)
    if values.size == 0:
        raise ValueError("no samples to test")
    if values.min() < support_min:
        raise ValueError(f"sample below support minimum {support_min}")
    total = values.size
    top = int(values.max())
    support = np.arange(support_min, top + 1)
    counts = np.bincount(values - support_min, minlength=support.size)
    probabilities = np.asarray(pmf(support), dtype=np.float64)
    probabilities[-1] = max(1.0 - float(probabilities[:-1].sum()), 0.0)
    observed, expected = _merge_bins(
        [int(c) for c in counts], [float(p) * total for p in probabilities]
    )
    if len(observed) < 2:
        return ChiSquareResult(0.0, 1.0, tuple(observed), tuple(expected))
    scale = total / sum(expected)
    expected = [value * scale for value in expected]
    statistic, pvalue = stats.chisquare(observed, expected)
    return ChiSquareResult(float(statistic), float(pvalue), tuple(observed), tuple(expected))


def geometric_pmf(p: float, shift: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """pmf of ``shift + Geometric(p)`` on ``{shift + 1, ...}``."""

    def pmf(values: np.ndarray) -> np.ndarray:
        return stats.geom.pmf(values - shift, p)

    return pmf


def truncated_half_pmf(M: int) -> Callable[[np.ndarray], np.ndarray]:
    """pmf of Geom_{<=M}(1/2)."""

    norm = 1.0 - 2.0**-M

    def pmf(values: np.ndarray) -> np.ndarray:
        values = np.asarray(values)
        return np.where((values >= 1) & (values <= M), 0.5**values / norm, 0.0)

    return pmf
