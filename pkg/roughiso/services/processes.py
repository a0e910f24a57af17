"""Samplers for percolations and geometric gap laws, and the explicit couplings."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Any, Optional, overload

import numpy as np

from ..libs.exceptions import EmptyWindowError, PreconditionViolatedError
from ..libs.sampling import GapSampler
from ..libs.seeding import Seed
from ..libs.utils import parse_rational
from .pointsets import REAL_UNIT_BITS, Mapping, PointSet, RealPointSet
from .verify import RiConstants

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _sampler(seed: Seed, label: str) -> GapSampler:
    return GapSampler(seed.child(label).generator())


def _probability(p: Any) -> Fraction:
    p = parse_rational(p)
    if not 0 < p < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return p


def geometric_gaps(sampler: GapSampler, p: Fraction, size: int) -> np.ndarray:
    if p == HALF:
        return sampler.geometric_half(size)
    return sampler.geometric(float(p), size)


def sample_bernoulli_rooted(count_points: int, p: Any, seed: Seed) -> PointSet:
    """Rooted Bernoulli percolation on the naturals, first ``count_points`` points."""

    if count_points < 1:
        raise PreconditionViolatedError("count_points must be at least 1")
    p = _probability(p)
    gaps = geometric_gaps(_sampler(seed, "bernoulli"), p, count_points - 1)
    return PointSet.from_gaps(gaps.tolist())


@overload
def sample_geom_truncated(M: int, seed: Seed, size: None = None) -> int: ...
@overload
def sample_geom_truncated(M: int, seed: Seed, size: int) -> np.ndarray: ...
def sample_geom_truncated(M: int, seed: Seed, size: Optional[int] = None) -> Any:
    """Geom_{<=M}(1/2); a single value, or an array of ``size`` draws."""

    values = _sampler(seed, "geom-truncated").truncated(M, 1 if size is None else size)
    return int(values[0]) if size is None else values


@overload
def sample_geom_shifted(M: int, seed: Seed, size: None = None) -> int: ...
@overload
def sample_geom_shifted(M: int, seed: Seed, size: int) -> np.ndarray: ...
def sample_geom_shifted(M: int, seed: Seed, size: Optional[int] = None) -> Any:
    """Geom_{>M}(1/2) = M + Geometric(1/2)."""

    values = _sampler(seed, "geom-shifted").shifted(M, 1 if size is None else size)
    return int(values[0]) if size is None else values


def couple_dominance(M: int, seed: Seed, size: Optional[int] = None) -> Any:
    """Monotone coupling of Geom_{<=M}(1/2) under Geometric(1/2).

    Draw i.i.d. Geometric(1/2) values ``Z_1, Z_2, ...``; ``y = Z_1`` and ``x``
    is the first ``Z_i <= M``, so ``x <= y`` on every draw.
    """

    if M < 1:
        raise ValueError(f"M must be at least 1, got {M}")
    count = 1 if size is None else size
    sampler = _sampler(seed, "dominance")
    y = sampler.geometric_half(count)
    x = y.copy()
    pending = np.flatnonzero(x > M)
    while pending.size:
        fresh = sampler.geometric_half(pending.size)
        x[pending] = fresh
        pending = pending[fresh > M]
    if size is None:
        return int(x[0]), int(y[0])
    return x, y


def _runs_then_long(sampler: GapSampler, M: int, count: int) -> np.ndarray:
    """``count`` i.i.d. Geometric(1/2) gaps generated run by run.

    A run of short gaps has length ``Geom(2**-M) - 1`` and is closed by a
    long gap; runs are truncated once ``count`` gaps exist.
    """

    rho = 2.0**-M
    pieces: list[np.ndarray] = []
    produced = 0
    while produced < count:
        run = int(sampler.geometric(rho, 1)[0]) - 1
        run = min(run, count - produced)
        if run:
            pieces.append(sampler.truncated(M, run))
            produced += run
        if produced < count:
            pieces.append(sampler.shifted(M, 1))
            produced += 1
    if not pieces:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(pieces)


def sample_with_initial_short_gaps(L: int, M: int, horizon_points: int, seed: Seed) -> PointSet:
    """Rooted percolation conditioned on ``L`` short gaps followed by a long one."""

    if horizon_points <= L + 1:
        raise PreconditionViolatedError(
            f"horizon_points={horizon_points} must exceed L + 1 = {L + 1}"
        )
    sampler = _sampler(seed, "initial-short")
    head = sampler.truncated(M, L) if L else np.zeros(0, dtype=np.int64)
    long_gap = sampler.shifted(M, 1)
    tail = _runs_then_long(sampler, M, horizon_points - L - 2)
    gaps = np.concatenate([head, long_gap, tail])
    return PointSet.from_gaps(gaps.tolist())


def sample_poisson(alpha: Any, horizon: Any, seed: Seed) -> RealPointSet:
    """Poisson process of intensity ``alpha`` on ``[0, horizon]`` on the dyadic grid."""

    alpha = parse_rational(alpha)
    horizon = parse_rational(horizon)
    if alpha <= 0 or horizon <= 0:
        raise ValueError("alpha and horizon must be positive")
    sampler = _sampler(seed, "poisson")
    limit = int(horizon * (1 << REAL_UNIT_BITS))
    batch = max(16, int(float(alpha * horizon) * 1.25) + 16)
    units: list[int] = []
    position = 0
    while True:
        for spacing in sampler.exponential_units(float(alpha), REAL_UNIT_BITS, batch):
            position += int(spacing)
            if position > limit:
                return RealPointSet.from_units(units)
            units.append(position)


def dyadic(value: float) -> Fraction:
    """Round a positive float to the nearest multiple of ``2**-REAL_UNIT_BITS``."""

    units = max(1, int(round(value * (1 << REAL_UNIT_BITS))))
    return Fraction(units, 1 << REAL_UNIT_BITS)


def coupling_cell(alpha: Any, p: Any) -> Fraction:
    """Cell width ``c = -log(1 - p) / alpha`` rounded to the dyadic grid."""

    alpha = parse_rational(alpha)
    p = _probability(p)
    return dyadic(-math.log1p(-float(p)) / float(alpha))


def couple_poisson_percolation(
    alpha: Any, p: Any, horizon: Any, seed: Seed
) -> tuple[RealPointSet, PointSet, Mapping, RiConstants]:
    """Percolation read off a Poisson process by cells of width ``c``.

    ``n`` is kept iff the Poisson set meets ``[nc, (n+1)c)``; ``n`` maps to the
    smallest Poisson point of its cell.  Only complete cells inside the horizon
    are used, and the Poisson set is cut to them.
    """

    horizon = parse_rational(horizon)
    c = coupling_cell(alpha, p)
    poisson = sample_poisson(alpha, horizon, seed)
    cells = int(horizon // c)
    cut = cells * c
    kept = [x for x in poisson.points if x < cut]
    if not kept:
        raise EmptyWindowError(f"no Poisson point in {cells} complete cells")

    first_in_cell: dict[int, Fraction] = {}
    for x in kept:
        first_in_cell.setdefault(int(x // c), x)
    occupied = sorted(first_in_cell)
    percolation = PointSet(tuple(occupied), rooted=False)
    poisson_window = RealPointSet(tuple(kept))
    mapping = Mapping(
        percolation.points,
        tuple(first_in_cell[n] for n in occupied),
        poisson_window.points,
    )
    constants = RiConstants(max(c, 1 / c), c, c)
    logger.debug(f"coupled {len(occupied)} occupied cells of width {float(c):.6f}")
    return poisson_window, percolation, mapping, constants


def rescale_coupling(
    alpha: Any, gamma: Any, A: RealPointSet
) -> tuple[RealPointSet, Mapping, RiConstants]:
    """Intensity rescaling ``x -> (alpha / gamma) x``, exact on rationals."""

    ratio = parse_rational(alpha) / parse_rational(gamma)
    if ratio <= 0:
        raise ValueError("alpha and gamma must be positive")
    if not len(A):
        raise EmptyWindowError("cannot rescale an empty point set")
    image = RealPointSet(tuple(ratio * x for x in A.points))
    mapping = Mapping(A.points, image.points, image.points)
    return image, mapping, RiConstants(max(ratio, 1 / ratio), 0, 0)
