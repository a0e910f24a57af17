"""Blue/red block decomposition of a percolation and the segment samplers.

A block starts at ``T_{k-1}``; its blue segment runs through the short gaps
up to ``S_k``, the first point with a long gap, and its red segment runs from
``S_k`` to ``T_k``, the first later point followed by ``K`` short gaps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..libs.exceptions import HorizonTooSmallError
from ..libs.sampling import GapSampler
from ..libs.seeding import Seed
from .pointsets import PointSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockParams:
    M: int
    K: int

    def __post_init__(self) -> None:
        if self.M < 1 or self.K < 1:
            raise ValueError(f"block parameters must be positive, got M={self.M}, K={self.K}")


@dataclass(frozen=True)
class Block:
    """One block; slices keep the absolute coordinates of the source set."""

    blue: PointSet
    red: PointSet
    s_time: int
    t_time: int
    follow_gaps: tuple[int, ...] = ()

    @property
    def blue_gaps(self) -> tuple[int, ...]:
        return self.blue.gaps

    @property
    def red_gaps(self) -> tuple[int, ...]:
        return self.red.gaps

    def as_dict(self) -> dict[str, object]:
        return {
            "s_time": self.s_time,
            "t_time": self.t_time,
            "blue_gaps": list(self.blue_gaps),
            "red_gaps": list(self.red_gaps),
        }


@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple[Block, ...]
    leftover: PointSet
    params: Optional[BlockParams] = field(default=None, compare=False)

    def as_dict(self) -> dict[str, object]:
        return {
            "blocks": [block.as_dict() for block in self.blocks],
            "leftover": list(self.leftover.points),
        }


@dataclass(frozen=True)
class StructureViolation:
    block: int
    reason: str


def _slice(points: tuple[int, ...], start: int, stop: int) -> PointSet:
    chunk = points[start : stop + 1]
    return PointSet(chunk, rooted=bool(chunk) and chunk[0] == 0)


def decompose(A: PointSet, bp: BlockParams) -> BlockDecomposition:
    """Single left-to-right pass of the block recurrence.

    ``S_k`` is the first index at or after ``T_{k-1}`` whose gap is long (so
    ``S_1 = 0`` when the first gap is long); a block is emitted only when the
    ``K`` short gaps after ``T_k`` are all present in ``A``.
    """

    points = A.points
    gaps = A.gap_array()
    long = gaps > bp.M
    long_idx = np.flatnonzero(long)
    # ok[t]: the K gaps after point t are present and short
    window = np.concatenate([[0], np.cumsum(long)])
    last_start = gaps.size - bp.K
    if last_start >= 0:
        starts = np.arange(last_start + 1)
        ok_idx = np.flatnonzero(window[starts + bp.K] - window[starts] == 0)
    else:
        ok_idx = np.zeros(0, dtype=np.int64)

    blocks: list[Block] = []
    t_index = 0
    while True:
        pos = int(np.searchsorted(long_idx, t_index))
        if pos == long_idx.size:
            break
        s_index = int(long_idx[pos])
        pos = int(np.searchsorted(ok_idx, s_index + 1))
        if pos == ok_idx.size:
            break
        next_t = int(ok_idx[pos])
        blocks.append(
            Block(
                blue=_slice(points, t_index, s_index),
                red=_slice(points, s_index, next_t),
                s_time=points[s_index],
                t_time=points[next_t],
                follow_gaps=tuple(int(g) for g in gaps[next_t : next_t + bp.K]),
            )
        )
        t_index = next_t
    leftover = _slice(points, t_index, len(points) - 1)
    return BlockDecomposition(tuple(blocks), leftover, bp)


def event_E0(A: PointSet, bp: BlockParams) -> bool:
    """Whether the first ``K`` gaps of ``A`` are all short."""

    if len(A) < bp.K + 1:
        raise HorizonTooSmallError(f"need {bp.K + 1} points to decide, have {len(A)}")
    return bool(np.all(A.gap_array()[: bp.K] <= bp.M))


def structure_check(dec: BlockDecomposition, bp: BlockParams) -> Optional[StructureViolation]:
    """Shape invariants of every block; ``None`` when all hold."""

    for index, block in enumerate(dec.blocks):
        blue, red = block.blue_gaps, block.red_gaps
        if any(g > bp.M for g in blue):
            return StructureViolation(index, "long gap inside blue segment")
        if index > 0 and len(blue) < bp.K:
            return StructureViolation(index, f"blue segment shorter than K={bp.K}")
        if blue and block.blue.points[-1] != block.s_time:
            return StructureViolation(index, "blue segment does not end at S")
        if red and red[0] <= bp.M:
            return StructureViolation(index, "red segment does not start with a long gap")
        if not red or red[-1] <= bp.M:
            return StructureViolation(index, "red segment does not end right after a long gap")
        if len(block.follow_gaps) != bp.K or any(g > bp.M for g in block.follow_gaps):
            return StructureViolation(index, "T is not followed by K short gaps")
        if index + 1 < len(dec.blocks) and dec.blocks[index + 1].blue.points[0] != block.t_time:
            return StructureViolation(index, "consecutive blocks do not share T")
    return None


def sample_rooted_blue(L: int, M: int, seed: Seed) -> PointSet:
    """Rooted blue segment: ``L`` i.i.d. Geom_{<=M}(1/2) gaps."""

    sampler = GapSampler(seed.child("blue").generator())
    gaps = sampler.truncated(M, L) if L else np.zeros(0, dtype=np.int64)
    return PointSet.from_gaps(gaps.tolist())


def red_segment_gaps(sampler: GapSampler, M: int, K: int) -> list[int]:
    """Gap list of one red segment, built run by run.

    One long gap, then ``N ~ Geom((1 - 2**-M)**K) - 1`` subsequences, each
    made of ``Z < K`` short gaps closed by a long gap.
    """

    theta = math.exp(K * math.log1p(-(2.0**-M)))
    subsequences = int(sampler.geometric(theta, 1)[0]) - 1
    gaps = [int(sampler.shifted(M, 1)[0])]
    if subsequences == 0:
        return gaps
    runs = sampler.short_run_before_long(M, K, subsequences)
    shorts = sampler.truncated(M, int(runs.sum())) if runs.sum() else np.zeros(0, dtype=np.int64)
    longs = sampler.shifted(M, subsequences)
    cursor = 0
    for run, closing in zip(runs.tolist(), longs.tolist()):
        gaps.extend(int(g) for g in shorts[cursor : cursor + run])
        gaps.append(int(closing))
        cursor += run
    return gaps


def sample_rooted_red(M: int, K: int, seed: Seed) -> PointSet:
    sampler = GapSampler(seed.child("red").generator())
    return PointSet.from_gaps(red_segment_gaps(sampler, M, K))


def long_gap_count(segment: PointSet, M: int) -> int:
    return sum(1 for g in segment.gaps if g > M)


def post_cut_segment(U: PointSet, cut: int) -> PointSet:
    """Rooted remainder of a blue segment after point index ``cut``."""

    return U.window(U.points[cut], U.points[-1])
