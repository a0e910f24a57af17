"""Stage-by-stage assembly of a Markov rough isometry between two streams."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

from ..libs.exceptions import PreconditionViolatedError
from ..libs.seeding import Seed
from .construct import BlockMapOutcome, Direction, Params, block_map
from .pointsets import Mapping, PointSet
from .streams import GapStream
from .verify import RiConstants

logger = logging.getLogger(__name__)


class StageCase(str, Enum):
    A_INTO_B = "A-into-B"
    B_INTO_A = "B-into-A"


@dataclass
class StageRecord:
    stage: int
    case: Optional[StageCase]
    success: bool
    S: Optional[int] = None
    Y: Optional[int] = None
    Z: Optional[int] = None
    X: int = 0
    sub_counts: tuple[int, ...] = ()
    P_A: int = 0
    P_B: int = 0
    L_A: int = 0
    L_B: int = 0
    reason: Optional[str] = None

    def as_dict(self) -> dict[str, object]:
        payload = asdict(self)
        payload["case"] = self.case.value if self.case else None
        payload["sub_counts"] = list(self.sub_counts)
        return payload


@dataclass
class ConstructionResult:
    """Successful run: ``T`` is restricted to the first ``n`` points of ``A``.

    ``P_A``/``P_B`` are the final positions as point values.
    """

    T: Mapping
    A: PointSet
    B: PointSet
    P_A: int
    P_B: int
    params: Params
    stages: list[StageRecord] = field(default_factory=list)

    success = True


@dataclass
class ConstructionFailure:
    stage: int
    reason: str
    params: Params
    stages: list[StageRecord] = field(default_factory=list)

    success = False


Construction = Union[ConstructionResult, ConstructionFailure]


def _record(stage: int, case: StageCase, outcome: BlockMapOutcome, state: "_State") -> StageRecord:
    return StageRecord(
        stage=stage,
        case=case,
        success=outcome.success,
        S=outcome.S,
        Y=outcome.Y,
        Z=outcome.Z,
        X=outcome.X,
        sub_counts=outcome.sub_counts,
        P_A=state.A.point(state.P_A),
        P_B=state.B.point(state.P_B),
        L_A=state.L_A,
        L_B=state.L_B,
        reason=outcome.reason,
    )


@dataclass
class _State:
    A: GapStream
    B: GapStream
    P_A: int = 0
    P_B: int = 0
    L_A: int = 0
    L_B: int = 0
    # image[i]: index in B of the image of point i of A
    image: list[int] = field(default_factory=lambda: [0])


def _stage(state: _State, p: Params, stage: int) -> tuple[StageCase, BlockMapOutcome]:
    if state.L_B >= state.L_A:
        case = StageCase.A_INTO_B
        q = state.P_A + state.L_A
        end = state.A.block_end(q, p.M, p.K)
        U1 = state.A.segment(state.P_A, q)
        V = state.A.segment(q, end)
        U2 = state.B.segment(state.P_B, state.P_B + state.L_B)
        outcome = block_map(U1, V, U2, p, directions=(Direction.FORWARD,)).outcomes[Direction.FORWARD]
        if outcome.success:
            assert outcome.S is not None
            state.image.extend(state.P_B + k for k in outcome.index_map[1:])
            state.P_A = end
            state.L_A = state.A.short_run(end, p.M)
            state.P_B += outcome.S
            state.L_B -= outcome.S
    else:
        case = StageCase.B_INTO_A
        q = state.P_B + state.L_B
        end = state.B.block_end(q, p.M, p.K)
        U1 = state.B.segment(state.P_B, q)
        V = state.B.segment(q, end)
        U2 = state.A.segment(state.P_A, state.P_A + state.L_A)
        outcome = block_map(U1, V, U2, p, directions=(Direction.REVERSE,)).outcomes[Direction.REVERSE]
        if outcome.success:
            assert outcome.S is not None
            state.image.extend(state.P_B + k for k in outcome.index_map[1:])
            state.P_A += outcome.S
            state.L_A -= outcome.S
            state.P_B = end
            state.L_B = state.B.short_run(end, p.M)
    logger.debug(f"stage {stage} {case.value}: success={outcome.success} S={outcome.S}")
    return case, outcome


def build_ri(A: GapStream, B: GapStream, p: Params) -> Construction:
    """Run the induction until ``n`` points of ``A`` are covered.

    Each stage maps the next block of the process with the shorter residual
    blue run onto the residual run of the other process.  The result covers
    ``A``'s first ``n`` points and the part of ``B`` up to their last image.
    """

    state = _State(A, B)
    stages: list[StageRecord] = []
    e0_a = A.next_long(0, p.M, stop=p.K) is None
    e0_b = B.next_long(0, p.M, stop=p.K) is None
    if not (e0_a and e0_b):
        stages.append(StageRecord(stage=0, case=None, success=False, reason="E0"))
        return ConstructionFailure(0, "E0", p, stages)
    state.L_A = A.short_run(0, p.M)
    state.L_B = B.short_run(0, p.M)
    stages.append(StageRecord(stage=0, case=None, success=True, L_A=state.L_A, L_B=state.L_B))

    stage = 0
    while state.P_A < p.n and stage < p.n:
        stage += 1
        case, outcome = _stage(state, p, stage)
        record = _record(stage, case, outcome, state)
        stages.append(record)
        if not outcome.success:
            return ConstructionFailure(stage, outcome.reason or "bound", p, stages)
        if 2 * min(state.L_A, state.L_B) < p.K or max(state.L_A, state.L_B) < p.K:
            record.success = False
            record.reason = "residual"
            return ConstructionFailure(stage, "residual", p, stages)

    domain = A.prefix(p.n)
    top = max(state.image[: p.n])
    codomain = B.prefix(top + 1)
    T = Mapping(domain.points, tuple(codomain.points[k] for k in state.image[: p.n]), codomain.points)
    logger.info(f"built rough isometry on {p.n} points in {stage} stages")
    return ConstructionResult(
        T=T,
        A=domain,
        B=codomain,
        P_A=A.point(state.P_A),
        P_B=B.point(state.P_B),
        params=p,
        stages=stages,
    )


def construct(p: Params, seed: Seed, max_points: Optional[int] = None) -> Construction:
    """``build_ri`` on fresh streams derived from ``seed``."""

    A = GapStream(seed.child("A"), max_points=max_points)
    B = GapStream(seed.child("B"), max_points=max_points)
    return build_ri(A, B, p)


def trivial_baseline(A: PointSet, B: PointSet, n: int) -> tuple[Mapping, RiConstants]:
    """Map the i-th point of ``A`` to the i-th point of ``B``.

    For an order-preserving bijection every pairwise ratio is a mediant of
    adjacent ones, so the smallest ``M`` with ``(M, 0, 0)`` is the largest
    adjacent ratio in either direction.
    """

    if n < 1 or len(A) < n or len(B) < n:
        raise PreconditionViolatedError(f"need {n} points in both sets, have {len(A)} and {len(B)}")
    domain = A.prefix(n)
    codomain = B.prefix(n)
    worst = Fraction(1)
    for d, delta in zip(domain.gaps, codomain.gaps):
        worst = max(worst, Fraction(delta, d), Fraction(d, delta))
    return Mapping(domain.points, codomain.points, codomain.points), RiConstants(worst)
