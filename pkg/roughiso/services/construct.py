"""Block mapping: subsegment division, comb search and the two block maps.

``block_map`` maps a block ``W`` (a blue segment ``U1`` followed by a red
segment ``V``) onto an initial piece of another blue segment ``U2``
(``forward``), or that initial piece onto ``W`` (``reverse``).  Both results are
Markov rough isometries with the configured ``(M, F, R)`` whose endpoint has
a unique preimage.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from ..libs.exceptions import InsufficientGapsError, PreconditionViolatedError
from .pointsets import Mapping, PointSet
from .verify import MarkovConstants

logger = logging.getLogger(__name__)


# -- parameters ---------------------------------------------------------------


def _log2(n: int) -> float:
    if n > 0 and n & (n - 1) == 0:
        return float(n.bit_length() - 1)
    return math.log2(n)


@dataclass(frozen=True)
class Params:
    """Construction parameters for ``n`` points.

    ``alpha = q / sqrt(log2 n)`` is irrational in general and is kept as a
    float for reporting only; every decision uses the integers.
    """

    n: int
    q: int
    alpha: float
    M: int
    F: int
    R: int
    K: int
    small_n: bool = False
    overridden: bool = False

    @property
    def log2n(self) -> float:
        return _log2(self.n)

    @property
    def sqrt_log2n(self) -> float:
        return math.sqrt(self.log2n)

    @property
    def markov(self) -> MarkovConstants:
        return MarkovConstants(self.M, self.F, self.R)

    def stage_bound_ok(self, S: int, L1: int) -> bool:
        """``S <= max(K/2, L1 / sqrt(log2 n))``."""

        return 2 * S <= self.K or S * S * self.log2n <= L1 * L1

    def with_overrides(
        self,
        M: Optional[int] = None,
        F: Optional[int] = None,
        R: Optional[int] = None,
        K: Optional[int] = None,
    ) -> "Params":
        updated = replace(
            self,
            M=self.M if M is None else M,
            F=self.F if F is None else F,
            R=self.R if R is None else R,
            K=self.K if K is None else K,
            overridden=self.overridden or any(v is not None for v in (M, F, R, K)),
        )
        updated.validate()
        return updated

    def validate(self) -> None:
        if min(self.M, self.F, self.R, self.K) < 1:
            raise ValueError(f"M, F, R, K must be positive: {self}")
        if not self.M == self.F == self.R:
            logger.warning(f"M, F, R differ ({self.M}, {self.F}, {self.R}); guarantees assume equality")

    def as_dict(self) -> dict[str, object]:
        return {
            "n": self.n,
            "q": self.q,
            "alpha": self.alpha,
            "M": self.M,
            "F": self.F,
            "R": self.R,
            "K": self.K,
            "small_n": self.small_n,
            "overridden": self.overridden,
        }


def default_params(n: int) -> Params:
    """``M = F = R = 10q`` and ``K = 2**q`` with ``q`` just below ``sqrt(log2 n)``.

    ``q`` is accepted only when ``q / sqrt(log2 n)`` lies strictly inside
    ``(0.99, 1)``; otherwise ``q = max(1, floor(sqrt(log2 n)))`` is used and the
    parameters are flagged ``small_n``.
    """

    if n < 2:
        raise PreconditionViolatedError(f"n must be at least 2, got {n}")
    log2n = _log2(n)
    root = math.sqrt(log2n)
    q = math.ceil(root) - 1
    small_n = not (q >= 1 and 10000 * q * q > 9801 * log2n)
    if small_n:
        q = max(1, math.floor(root))
        logger.warning(f"n={n}: no integer q with q/sqrt(log2 n) in (0.99, 1); using q={q}")
    params = Params(
        n=n,
        q=q,
        alpha=q / root,
        M=10 * q,
        F=10 * q,
        R=10 * q,
        K=2**q,
        small_n=small_n,
    )
    params.validate()
    return params


# -- divisions ----------------------------------------------------------------


def divide_subsegments(U: PointSet | Sequence[int], Z: int) -> tuple[list[tuple[int, int]], int]:
    """Greedy division into index ranges of diameter at most ``Z``.

    Each range starts right after the previous one and extends as far as the
    diameter bound allows.
    """

    points = np.asarray(U.points if isinstance(U, PointSet) else U, dtype=np.int64)
    ranges: list[tuple[int, int]] = []
    start = 0
    while start < points.size:
        stop = int(np.searchsorted(points, points[start] + Z, side="right")) - 1
        ranges.append((start, stop))
        start = stop + 1
    return ranges, len(ranges)


class StrideWalk:
    """Walks from the first to the last point with steps of length at most ``M``.

    ``min_steps[i]`` is the fewest steps from point ``i`` to the end, obtained by
    always jumping to the farthest reachable point.
    """

    def __init__(self, points: Sequence[int], M: int):
        self.points = np.asarray(points, dtype=np.int64)
        self.M = M
        if np.any(np.diff(self.points) > M):
            raise PreconditionViolatedError(f"stride walk needs gaps at most M={M}")
        last = self.points.size - 1
        self.far = np.minimum(
            np.searchsorted(self.points, self.points + M, side="right") - 1, last
        )
        steps = np.zeros(self.points.size, dtype=np.int64)
        for i in range(last - 1, -1, -1):
            steps[i] = 1 + steps[self.far[i]]
        self.min_steps = steps

    @property
    def last(self) -> int:
        return int(self.points.size - 1)

    def walk(self, steps: Optional[int] = None) -> list[int]:
        """Indices visited by a walk of exactly ``steps`` steps (default: fewest)."""

        need = int(self.min_steps[0]) if steps is None else steps
        if not int(self.min_steps[0]) <= need <= self.last:
            raise PreconditionViolatedError(
                f"no walk with {need} steps; feasible range {int(self.min_steps[0])}..{self.last}"
            )
        path = [0]
        i = 0
        while i < self.last:
            if need == self.last - i:
                path.extend(range(i + 1, self.last + 1))
                break
            i = min(int(self.far[i]), self.last - need + 1)
            path.append(i)
            need -= 1
        return path


# -- comb search --------------------------------------------------------------


@dataclass(frozen=True)
class CombSpec:
    """Required gap sizes ``a`` at spacings ``d`` along a gap sequence."""

    a: tuple[int, ...]
    d: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(int(v) for v in self.a))
        object.__setattr__(self, "d", tuple(int(v) for v in self.d))
        if not self.a:
            raise ValueError("a comb needs at least one tooth")
        if len(self.d) != len(self.a) - 1:
            raise ValueError(f"{len(self.a)} teeth need {len(self.a) - 1} distances, got {len(self.d)}")
        if any(v < 1 for v in self.a) or any(v < 0 for v in self.d):
            raise ValueError("tooth sizes must be positive and distances non-negative")

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for gap in self.d:
            out.append(out[-1] + gap + 1)
        return tuple(out)

    @property
    def span(self) -> int:
        """``m - 1 + sum(d)``: offset of the last tooth."""

        return self.offsets[-1]


@dataclass(frozen=True)
class CombMatch:
    position: int
    stopping_index: int


def comb_search(G: Sequence[int] | np.ndarray, spec: CombSpec, limit: int) -> Optional[CombMatch]:
    """Smallest valid position ``l <= limit`` (1-based) or ``None``."""

    gaps = np.asarray(G, dtype=np.int64)
    if limit < 1:
        return None
    if gaps.size < limit + spec.span:
        raise InsufficientGapsError(
            f"comb search up to {limit} needs {limit + spec.span} gaps, got {gaps.size}"
        )
    valid = np.ones(limit, dtype=bool)
    for tooth, offset in zip(spec.a, spec.offsets):
        valid &= gaps[offset : offset + limit] >= tooth
    hits = np.flatnonzero(valid)
    if not hits.size:
        return None
    position = int(hits[0]) + 1
    return CombMatch(position, position + spec.span)


# -- block map ----------------------------------------------------------------


class Direction(str, Enum):
    FORWARD = "forward"
    REVERSE = "reverse"


@dataclass
class BlockMapOutcome:
    """Result of one direction of the block map.

    ``index_map`` maps domain indices to codomain indices; for ``forward`` the
    domain is ``W``, for ``reverse`` it is ``U2[0..S]``.
    """

    direction: Direction
    success: bool
    reason: Optional[str] = None
    S: Optional[int] = None
    Y: Optional[int] = None
    Z: Optional[int] = None
    X: int = 0
    sub_counts: tuple[int, ...] = ()
    index_map: tuple[int, ...] = ()
    mapping: Optional[Mapping] = None


@dataclass
class BlockMapResult:
    W: PointSet
    U2: PointSet
    outcomes: dict[Direction, BlockMapOutcome] = field(default_factory=dict)

    @property
    def forward(self) -> Optional[BlockMapOutcome]:
        return self.outcomes.get(Direction.FORWARD)

    @property
    def reverse(self) -> Optional[BlockMapOutcome]:
        return self.outcomes.get(Direction.REVERSE)


def concatenate_block(U1: PointSet, V: PointSet) -> PointSet:
    end = U1.points[-1]
    return PointSet(U1.points + tuple(end + v for v in V.points[1:]), rooted=True)


def _long_starts(V: PointSet, M: int) -> list[int]:
    return [i for i, g in enumerate(V.gaps) if g > M]


def _check_preconditions(U1: PointSet, V: PointSet, U2: PointSet, p: Params) -> None:
    L1, L2 = len(U1) - 1, len(U2) - 1
    if not (U1.rooted and V.rooted and U2.rooted):
        raise PreconditionViolatedError("U1, V and U2 must be rooted")
    if 2 * L1 < p.K:
        raise PreconditionViolatedError(f"L1={L1} is below K/2={p.K / 2}")
    if L2 < max(p.K, L1):
        raise PreconditionViolatedError(f"L2={L2} is below max(K, L1)={max(p.K, L1)}")
    if any(g > p.M for g in U1.gaps) or any(g > p.M for g in U2.gaps):
        raise PreconditionViolatedError("blue segments must only have short gaps")
    gaps = V.gaps
    if not gaps or gaps[0] <= p.M or gaps[-1] <= p.M:
        raise PreconditionViolatedError("V must start and end with a long gap")


def _comb(
    U2: PointSet, V: PointSet, starts: list[int], head: int, sub_counts: list[int], p: Params
) -> tuple[Optional[CombMatch], CombSpec, int]:
    """Comb of the long gaps of ``V`` searched on the gaps of ``U2`` after ``head``."""

    gaps = V.gaps
    spec = CombSpec(
        a=tuple(math.ceil(gaps[z] / p.M) for z in starts),
        d=tuple(count - 1 for count in sub_counts),
    )
    L2 = len(U2) - 1
    shifted = U2.gap_array()[head + 1 :]
    limit = L2 - head - 1 - spec.span
    if limit < 1:
        return None, spec, limit
    return comb_search(shifted, spec, limit), spec, limit


def _forward(U1: PointSet, V: PointSet, U2: PointSet, W: PointSet, p: Params) -> BlockMapOutcome:
    L1 = len(U1) - 1
    starts = _long_starts(V, p.M)
    X = len(starts)
    ranges, Y = divide_subsegments(U1, p.F)
    pieces = []
    for j in range(X - 1):
        part = V.points[starts[j] + 1 : starts[j + 1] + 1]
        pieces.append(divide_subsegments(part, p.F)[0])
    sub_counts = [len(r) for r in pieces]
    outcome = BlockMapOutcome(Direction.FORWARD, False, Y=Y, X=X, sub_counts=tuple(sub_counts))

    match, spec, _ = _comb(U2, V, starts, Y, sub_counts, p)
    if match is None:
        outcome.reason = "comb"
        return outcome
    Z = match.position
    S = Y + Z + 1 + sum(sub_counts)
    outcome.Z, outcome.S = Z, S
    if not p.stage_bound_ok(S, L1) or Z > L1 - Y:
        outcome.reason = "bound"
        return outcome

    owner = np.empty(L1 + 1, dtype=np.int64)
    for j, (lo, hi) in enumerate(ranges, start=1):
        owner[lo : hi + 1] = j
    target = Y + Z + 1
    switch = next(i for i in range(L1 + 1) if L1 - i == target - int(owner[i]))
    j0 = int(owner[switch])
    image = [int(owner[i]) - 1 for i in range(switch)]
    image.extend(j0 - 1 + (i - switch) for i in range(switch, L1 + 1))

    base = Y + Z + 1
    for j in range(X - 1):
        for k, (lo, hi) in enumerate(pieces[j]):
            image.extend([base + k] * (hi - lo + 1))
        base += sub_counts[j]
    image.append(base)
    assert base == S and len(image) == len(W)

    codomain = U2.prefix(S + 1)
    outcome.success = True
    outcome.index_map = tuple(image)
    outcome.mapping = Mapping(W.points, tuple(codomain.points[k] for k in image), codomain.points)
    return outcome


def _reverse(U1: PointSet, V: PointSet, U2: PointSet, W: PointSet, p: Params) -> BlockMapOutcome:
    if 2 * p.R < p.M:
        raise PreconditionViolatedError(f"reverse block map needs 2R >= M, got R={p.R}, M={p.M}")
    L1 = len(U1) - 1
    starts = _long_starts(V, p.M)
    X = len(starts)
    head_walk = StrideWalk(U1.points, p.M)
    Y = int(head_walk.min_steps[0]) + 1
    walks = []
    for j in range(X - 1):
        part = V.points[starts[j] + 1 : starts[j + 1] + 1]
        walker = StrideWalk(part, p.M)
        walks.append([starts[j] + 1 + i for i in walker.walk()])
    sub_counts = [len(w) for w in walks]
    outcome = BlockMapOutcome(Direction.REVERSE, False, Y=Y, X=X, sub_counts=tuple(sub_counts))

    match, spec, _ = _comb(U2, V, starts, Y, sub_counts, p)
    if match is None:
        outcome.reason = "comb"
        return outcome
    Z = match.position
    S = Y + Z + 1 + sum(sub_counts)
    outcome.Z, outcome.S = Z, S
    if not p.stage_bound_ok(S, L1) or Z > L1 - Y:
        outcome.reason = "bound"
        return outcome

    image = list(head_walk.walk(Y + Z))
    for j in range(X - 1):
        image.extend(L1 + v for v in walks[j])
    image.append(L1 + starts[-1] + 1)
    assert len(image) == S + 1 and image[-1] == len(W) - 1

    domain = U2.prefix(S + 1)
    outcome.success = True
    outcome.index_map = tuple(image)
    outcome.mapping = Mapping(domain.points, tuple(W.points[k] for k in image), W.points)
    return outcome


def block_map(
    U1: PointSet,
    V: PointSet,
    U2: PointSet,
    p: Params,
    directions: Sequence[Direction | str] = (Direction.FORWARD, Direction.REVERSE),
) -> BlockMapResult:
    """Map the block ``W = U1 + V`` against the blue segment ``U2``.

    A direction fails with reason ``comb`` when no comb position fits inside
    ``U2`` and with reason ``bound`` when ``S`` exceeds the stage bound.
    """

    _check_preconditions(U1, V, U2, p)
    W = concatenate_block(U1, V)
    result = BlockMapResult(W, U2)
    for raw in directions:
        direction = Direction(raw)
        build = _forward if direction is Direction.FORWARD else _reverse
        result.outcomes[direction] = build(U1, V, U2, W, p)
    return result
