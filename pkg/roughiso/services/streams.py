"""Demand-driven rooted percolation streams."""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..config import get_settings
from ..libs.exceptions import StreamExhaustedError
from ..libs.sampling import GapSampler
from ..libs.seeding import Seed
from .pointsets import PointSet

logger = logging.getLogger(__name__)


class GapStream:
    """Rooted Bernoulli(1/2) percolation whose gaps are drawn as they are needed.

    Point ``i`` is ``points[i]``; ``gap_after(i)`` is ``points[i + 1] - points[i]``.
    Storage doubles on demand up to ``max_points`` and only the fresh gaps are
    summed, so growing to ``n`` points costs ``O(n)`` amortised.
    """

    def __init__(
        self,
        seed: Seed,
        max_points: Optional[int] = None,
        refill: Optional[int] = None,
    ):
        settings = get_settings()
        self.seed = seed
        self.max_points = max_points or settings.stream_point_budget
        self.refill = refill or settings.stream_refill
        self._sampler = GapSampler(seed.generator())
        self._gaps = np.zeros(0, dtype=np.int64)
        self._points = np.zeros(1, dtype=np.int64)

    @property
    def available(self) -> int:
        """Number of points currently materialised."""

        return int(self._points.size)

    def ensure(self, count_points: int) -> None:
        if count_points <= self.available:
            return
        if count_points > self.max_points:
            raise StreamExhaustedError(
                f"stream {self.seed.describe()} needs {count_points} points, "
                f"budget is {self.max_points}"
            )
        previous = self.available
        growth = max(previous, self.refill)
        target = max(count_points, min(self.max_points, previous + growth))
        fresh = self._sampler.geometric_half(target - previous)
        self._gaps = np.concatenate([self._gaps, fresh])
        self._points = np.concatenate([self._points, self._points[-1] + np.cumsum(fresh)])
        if previous < self.max_points // 2 <= target:
            logger.warning(f"stream {self.seed.describe()} passed half of its point budget")

    def point(self, index: int) -> int:
        self.ensure(index + 1)
        return int(self._points[index])

    def gap_after(self, index: int) -> int:
        self.ensure(index + 2)
        return int(self._gaps[index])

    def gaps(self, start: int, stop: int) -> np.ndarray:
        """Gaps after points ``start .. stop - 1``."""

        self.ensure(stop + 1)
        return self._gaps[start:stop].copy()

    def segment(self, start: int, stop: int) -> PointSet:
        """Points ``start .. stop`` (inclusive) translated to start at 0."""

        self.ensure(stop + 1)
        chunk = self._points[start : stop + 1] - self._points[start]
        return PointSet(tuple(chunk.tolist()), rooted=True)

    def prefix(self, count: int) -> PointSet:
        self.ensure(count)
        return PointSet(tuple(self._points[:count].tolist()), rooted=True)

    def next_long(self, start: int, M: int, stop: Optional[int] = None) -> Optional[int]:
        """First ``i >= start`` whose following gap exceeds ``M``; ``None`` if ``stop`` comes first."""

        position = start
        while stop is None or position < stop:
            window_end = position + self.refill if stop is None else min(stop, position + self.refill)
            chunk = self.gaps(position, window_end)
            hits = np.flatnonzero(chunk > M)
            if hits.size:
                return position + int(hits[0])
            position = window_end
        return None

    def short_run(self, start: int, M: int) -> int:
        """Number of consecutive short gaps after point ``start``."""

        end = self.next_long(start, M)
        assert end is not None
        return end - start

    def block_end(self, q: int, M: int, K: int) -> int:
        """First point index ``t > q`` followed by ``K`` short gaps."""

        t = q + 1
        while True:
            blocker = self.next_long(t, M, stop=t + K)
            if blocker is None:
                return t
            t = blocker + 1
