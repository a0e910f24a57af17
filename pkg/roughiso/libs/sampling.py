"""Inverse-CDF samplers driven by raw 64-bit words.

All samplers consume ``rng.bit_generator.random_raw`` so that every draw is a
deterministic function of the seed, independent of numpy's float paths.
Truncated laws are sampled through the inverse CDF of the renormalised law,
never by rejection.
"""

from __future__ import annotations

import math

import numpy as np

_LOW32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_TWO_POW_MINUS_53 = 2.0**-53


def bit_length(words: np.ndarray) -> np.ndarray:
    """Vectorised ``int.bit_length`` for ``uint64`` arrays."""

    words = np.asarray(words, dtype=np.uint64)
    high = (words >> _SHIFT32).astype(np.float64)
    low = (words & _LOW32).astype(np.float64)
    high_bits = np.frexp(high)[1].astype(np.int64)
    low_bits = np.frexp(low)[1].astype(np.int64)
    return np.where(high_bits > 0, high_bits + 32, low_bits)


def _as_size(size: int | None) -> int:
    return 1 if size is None else int(size)


class GapSampler:
    """Geometric gap laws on ``{1, 2, ...}`` backed by a numpy generator."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def words(self, size: int) -> np.ndarray:
        return np.asarray(self.rng.bit_generator.random_raw(size), dtype=np.uint64)

    def uniform(self, size: int) -> np.ndarray:
        """Uniforms on ``[0, 1)`` with 53 random bits each."""

        return (self.words(size) >> _SHIFT11).astype(np.float64) * _TWO_POW_MINUS_53

    def geometric_half(self, size: int) -> np.ndarray:
        """Geometric(1/2): position of the first set bit in a random bit stream."""

        total = np.zeros(size, dtype=np.int64)
        pending = np.arange(size)
        while pending.size:
            words = self.words(pending.size)
            total[pending] += 64 - bit_length(words)
            pending = pending[words == 0]
        return total + 1

    def truncated(self, M: int, size: int) -> np.ndarray:
        """Geom_{<=M}(1/2), exact inverse CDF in 64-bit integer arithmetic.

        With ``u = w / 2**64`` the inverse CDF is the smallest ``k`` such that
        ``2**-k < 1 - u (1 - 2**-M)``.  Scaling by ``2**64`` and taking ceilings
        gives ``k = 65 - bit_length(~w + (w >> M) + [w mod 2**M != 0])``.
        """

        if M < 1:
            raise ValueError(f"M must be at least 1, got {M}")
        words = self.words(size)
        if M >= 64:
            shifted = np.zeros_like(words)
            carry = (words != 0).astype(np.uint64)
        else:
            shifted = words >> np.uint64(M)
            carry = ((words & np.uint64((1 << M) - 1)) != 0).astype(np.uint64)
        ceiling = ~words + shifted + carry
        return 65 - bit_length(ceiling)

    def shifted(self, M: int, size: int) -> np.ndarray:
        """Geom_{>M}(1/2), that is ``M + Geometric(1/2)``."""

        if M < 0:
            raise ValueError(f"M must be non-negative, got {M}")
        return self.geometric_half(size) + M

    def geometric(self, p: float, size: int) -> np.ndarray:
        """Geometric(p) on ``{1, 2, ...}`` for a general success probability."""

        if not 0.0 < p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {p}")
        if p == 1.0:
            return np.ones(size, dtype=np.int64)
        u = self.uniform(size)
        values = np.floor(np.log1p(-u) / math.log1p(-p)) + 1
        return values.astype(np.int64)

    def short_run_before_long(self, M: int, K: int, size: int) -> np.ndarray:
        """Zero-based run of short gaps closed by a long one, conditioned below ``K``.

        The run length of short gaps before a long gap is ``Geom(2**-M) - 1``;
        conditioning on a value below ``K`` is inverted in closed form.
        """

        log_short = math.log1p(-(2.0**-M))
        mass = -math.expm1(K * log_short)
        u = self.uniform(size)
        values = np.floor(np.log1p(-u * mass) / log_short).astype(np.int64)
        return np.clip(values, 0, K - 1)

    def exponential_units(self, rate: float, unit_bits: int, size: int) -> np.ndarray:
        """Exponential(rate) spacings rounded to integer multiples of ``2**-unit_bits``.

        Returned as Python ints in an object array so the fixed point never
        overflows; every spacing is at least one unit.
        """

        u = self.uniform(size)
        spacings = -np.log1p(-u) / rate
        scale = float(2**unit_bits)
        units = [max(1, int(round(float(value) * scale))) for value in spacings]
        return np.array(units, dtype=object)
