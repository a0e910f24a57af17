"""Exact solvers for small instances.

All searches return witnesses in lexicographic order of their image lists and
count visited nodes against a :class:`SearchBudget`.
"""

from __future__ import annotations

import bisect
import itertools
import logging
import math
from dataclasses import dataclass, fields
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional, Union

from ..config import get_settings
from ..config.settings import load_settings_or_default
from ..libs.exceptions import BudgetExceededError, NotFoundWithinBudgetError
from ..libs.utils import parse_rational
from .pointsets import AnyPointSet, Mapping, PointSet
from .verify import MarkovConstants, RiConstants

logger = logging.getLogger(__name__)

INFINITY = math.inf
GRID_DENOMINATOR = 64


@dataclass(frozen=True)
class SearchBudget:
    max_domain_points: int = 20
    max_codomain_points: int = 40
    max_codomain_value: int = 4096
    max_nodes: int = 2_000_000
    timeout_hint: float = 60.0

    def __post_init__(self) -> None:
        for item in fields(self):
            if getattr(self, item.name) <= 0:
                raise ValueError(f"budget field {item.name} must be positive")

    @classmethod
    def from_settings(cls, overrides: Optional[dict[str, Any]] = None) -> "SearchBudget":
        values = dict(load_settings_or_default(get_settings().settings_file).SEARCH_BUDGET)
        values.update(overrides or {})
        known = {item.name for item in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})

    def admit(self, A: AnyPointSet, B: AnyPointSet) -> None:
        if len(A) > self.max_domain_points:
            raise BudgetExceededError(f"|A|={len(A)} exceeds {self.max_domain_points}")
        if len(B) > self.max_codomain_points:
            raise BudgetExceededError(f"|B|={len(B)} exceeds {self.max_codomain_points}")
        if B.points and B.points[-1] > self.max_codomain_value:
            raise BudgetExceededError(f"codomain value {B.points[-1]} exceeds {self.max_codomain_value}")


class _Counter:
    def __init__(self, budget: SearchBudget):
        self.limit = budget.max_nodes
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.limit:
            raise BudgetExceededError(f"search visited more than {self.limit} nodes")


def _rooted(A: AnyPointSet, B: AnyPointSet) -> bool:
    return bool(A.points) and bool(B.points) and A.points[0] == 0 and B.points[0] == 0


def _mapping(A: AnyPointSet, B: AnyPointSet, picks: tuple[int, ...]) -> Mapping:
    return Mapping(A.points, tuple(B.points[j] for j in picks), B.points)


# -- Markov dynamic program ---------------------------------------------------


class _MarkovProgram:
    """Feasibility of states ``(i, j, f)``: point ``i`` maps to ``B[j]``, its fiber starts at ``f``."""

    def __init__(self, A: AnyPointSet, B: AnyPointSet, mc: MarkovConstants, budget: SearchBudget):
        self.a = A.points
        self.b = B.points
        self.mc = mc
        self.counter = _Counter(budget)
        self.memo: dict[tuple[int, int, int], bool] = {}
        m = len(self.b)
        # gap_ok[j][k]: codomain points strictly between b_j and b_k are R-close to one of them
        self.gap_ok = [[False] * m for _ in range(m)]
        for j in range(m):
            for k in range(j + 1, m):
                worst = max(
                    (min(self.b[t] - self.b[j], self.b[k] - self.b[t]) for t in range(j + 1, k)),
                    default=0,
                )
                self.gap_ok[j][k] = worst <= mc.R
        self.tail_ok = [self.b[-1] - self.b[j] <= mc.R for j in range(m)]

    def moves(self, i: int, j: int, f: int) -> Iterator[tuple[int, int]]:
        """Successor states of point ``i + 1`` in increasing image order."""

        if self.a[i + 1] - self.a[f] <= self.mc.F:
            yield j, f
        d = self.a[i + 1] - self.a[i]
        for k in range(j + 1, len(self.b)):
            delta = self.b[k] - self.b[j]
            if delta > self.mc.M * d:
                break
            if delta * self.mc.M >= d and self.gap_ok[j][k]:
                yield k, i + 1

    def feasible(self, i: int, j: int, f: int) -> bool:
        key = (i, j, f)
        if key in self.memo:
            return self.memo[key]
        self.counter.tick()
        if i == len(self.a) - 1:
            result = self.tail_ok[j]
        else:
            result = any(self.feasible(i + 1, k, g) for k, g in self.moves(i, j, f))
        self.memo[key] = result
        return result

    def witnesses(self) -> Iterator[tuple[int, ...]]:
        if not self.feasible(0, 0, 0):
            return

        def extend(i: int, j: int, f: int, picks: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
            if i == len(self.a) - 1:
                yield picks
                return
            for k, g in self.moves(i, j, f):
                if self.feasible(i + 1, k, g):
                    yield from extend(i + 1, k, g, picks + (k,))

        yield from extend(0, 0, 0, (0,))


def exists_markov_ri(
    A: AnyPointSet, B: AnyPointSet, mc: MarkovConstants, budget: Optional[SearchBudget] = None
) -> Optional[Mapping]:
    """Lexicographically smallest Markov rough isometry ``A -> B`` or ``None``."""

    budget = budget or SearchBudget()
    budget.admit(A, B)
    if not _rooted(A, B):
        return None
    program = _MarkovProgram(A, B, mc, budget)
    picks = next(program.witnesses(), None)
    logger.debug(f"markov search visited {program.counter.nodes} states")
    return None if picks is None else _mapping(A, B, picks)


def enumerate_markov_ri(
    A: AnyPointSet, B: AnyPointSet, mc: MarkovConstants, budget: Optional[SearchBudget] = None
) -> list[Mapping]:
    budget = budget or SearchBudget()
    budget.admit(A, B)
    if not _rooted(A, B):
        return []
    program = _MarkovProgram(A, B, mc, budget)
    found = []
    for picks in program.witnesses():
        program.counter.tick()
        found.append(_mapping(A, B, picks))
    return found


# -- backtracking over pairwise constraints ------------------------------------


def _pair_ok(d: Any, delta: Any, c: RiConstants) -> bool:
    return d <= c.M * (delta + c.D) and delta <= c.M * d + c.D


def _dense(images: set[Any], b: tuple[Any, ...], R: Fraction) -> bool:
    ordered = sorted(images)
    for value in b:
        p = bisect.bisect_left(ordered, value)
        best = min(
            (abs(ordered[q] - value) for q in (p - 1, p) if 0 <= q < len(ordered)),
            default=None,
        )
        if best is None or best > R:
            return False
    return True


def _backtrack(
    A: AnyPointSet,
    B: AnyPointSet,
    c: RiConstants,
    budget: SearchBudget,
    *,
    monotone: bool,
    rooted: bool,
) -> Iterator[tuple[int, ...]]:
    a, b = A.points, B.points
    n, m = len(a), len(b)
    counter = _Counter(budget)
    if n == 0:
        return
    if rooted and not _rooted(A, B):
        return

    picks: list[int] = []

    def between_ok(j: int, k: int) -> bool:
        return all(min(b[t] - b[j], b[k] - b[t]) <= c.R for t in range(j + 1, k))

    def search(i: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            if monotone:
                if b[-1] - b[picks[-1]] <= c.R:
                    yield tuple(picks)
            elif _dense({b[j] for j in picks}, b, c.R):
                yield tuple(picks)
            return
        if i == 0 and rooted:
            candidates: range = range(0, 1)
        elif monotone and picks:
            candidates = range(picks[-1], m)
        else:
            candidates = range(m)
        for k in candidates:
            counter.tick()
            if monotone and picks and k > picks[-1] and not between_ok(picks[-1], k):
                continue
            if all(_pair_ok(a[i] - a[p], abs(b[k] - b[picks[p]]), c) for p in range(i)):
                picks.append(k)
                yield from search(i + 1)
                picks.pop()

    yield from search(0)


def enumerate_increasing_ri(
    A: AnyPointSet, B: AnyPointSet, c: RiConstants, budget: Optional[SearchBudget] = None
) -> list[Mapping]:
    """All rooted non-decreasing rough isometries, sorted lexicographically.

    Depth-first search over image indices.  Every new point is checked against
    all earlier ones because the distortion bound is not local, so unlike the
    Markov family there is no memoised state and the worst case is exponential
    in ``len(A)``.  Pruning keeps small instances cheap; ``budget.max_nodes``
    bounds the rest.  The result equals ``brute_force_monotone`` filtered by
    ``verify_rooted``.
    """

    budget = budget or SearchBudget()
    budget.admit(A, B)
    return [_mapping(A, B, p) for p in _backtrack(A, B, c, budget, monotone=True, rooted=True)]


def exists_increasing_ri(
    A: AnyPointSet, B: AnyPointSet, c: RiConstants, budget: Optional[SearchBudget] = None
) -> Optional[Mapping]:
    budget = budget or SearchBudget()
    budget.admit(A, B)
    picks = next(_backtrack(A, B, c, budget, monotone=True, rooted=True), None)
    return None if picks is None else _mapping(A, B, picks)


def enumerate_general_ri(
    A: AnyPointSet,
    B: AnyPointSet,
    c: RiConstants,
    budget: Optional[SearchBudget] = None,
    rooted: bool = False,
) -> Iterator[Mapping]:
    """Lazily yields every rough isometry (any order of images) in lexicographic order."""

    budget = budget or SearchBudget()
    budget.admit(A, B)
    for picks in _backtrack(A, B, c, budget, monotone=False, rooted=rooted):
        yield _mapping(A, B, picks)


def exists_general_ri(
    A: AnyPointSet,
    B: AnyPointSet,
    c: RiConstants,
    budget: Optional[SearchBudget] = None,
    rooted: bool = False,
) -> Optional[Mapping]:
    return next(enumerate_general_ri(A, B, c, budget, rooted), None)


def brute_force_monotone(
    A: AnyPointSet, B: AnyPointSet, accept: Callable[[Mapping], bool]
) -> list[Mapping]:
    """Reference enumeration over every non-decreasing image list; tiny inputs only."""

    found = []
    for picks in itertools.combinations_with_replacement(range(len(B)), len(A)):
        T = _mapping(A, B, picks)
        if accept(T):
            found.append(T)
    return found


# -- minimal constants ---------------------------------------------------------


class Family(str, Enum):
    ROOTED = "rooted"
    INCREASING = "increasing"
    MARKOV = "markov"


def _decider(
    A: AnyPointSet, B: AnyPointSet, family: Family, D: Fraction, R: Fraction, budget: SearchBudget
) -> Callable[[Fraction], bool]:
    if family is Family.MARKOV:
        return lambda M: exists_markov_ri(A, B, MarkovConstants(M, D, R), budget) is not None
    if family is Family.INCREASING:
        return lambda M: exists_increasing_ri(A, B, RiConstants(M, D, R), budget) is not None
    return lambda M: exists_general_ri(A, B, RiConstants(M, D, R), budget, rooted=True) is not None


def _ceiling(A: AnyPointSet, B: AnyPointSet, D: Fraction) -> int:
    """An ``M`` beyond which acceptance can no longer change."""

    span = max(A.points[-1] - A.points[0], B.points[-1] - B.points[0], 1)
    extra = math.ceil(Fraction(span) / D) if D > 0 else 0
    return int(span) + extra + 1


def minimal_multiplicative_constant(
    A: AnyPointSet,
    B: AnyPointSet,
    family: Union[Family, str],
    D: Any = 0,
    R: Any = 0,
    budget: Optional[SearchBudget] = None,
) -> Union[Fraction, float]:
    """Smallest ``M`` with denominator at most 64 for which ``family`` accepts.

    For the Markov family ``D`` plays the role of the fiber bound ``F``.
    Returns ``INFINITY`` when no ``M`` works.
    """

    family = Family(family)
    D, R = parse_rational(D), parse_rational(R)
    budget = budget or SearchBudget()
    budget.admit(A, B)
    accepts = _decider(A, B, family, D, R, budget)
    ceiling = _ceiling(A, B, D)
    if not accepts(Fraction(ceiling)):
        return INFINITY

    hi = 1
    while hi < ceiling and not accepts(Fraction(hi)):
        hi = min(2 * hi, ceiling)
    lo = hi // 2
    # smallest accepted integer lies in (lo, hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if accepts(Fraction(mid)):
            hi = mid
        else:
            lo = mid
    if hi == 1:
        return Fraction(1)
    grid = sorted(
        {
            Fraction(num, den)
            for den in range(1, GRID_DENOMINATOR + 1)
            for num in range((hi - 1) * den + 1, hi * den + 1)
        }
    )
    left, right = 0, len(grid) - 1
    while left < right:
        mid = (left + right) // 2
        if accepts(grid[mid]):
            right = mid
        else:
            left = mid + 1
    return grid[left]


# -- non-monotone counterexamples ------------------------------------------------


def analytic_counterexample(L: int) -> tuple[PointSet, PointSet, Mapping]:
    """Four-point pair with a non-monotone ``(3, 0, 0)`` witness; monotone maps need ``M = L``."""

    if L < 1:
        raise ValueError("L must be positive")
    A = PointSet((0, L, 2 * L, 2 * L + 1))
    B = PointSet((0, L, L + 1, 2 * L + 1))
    return A, B, Mapping(A.points, (0, 2 * L + 1, L, L + 1), B.points)


def _four_point_sets(top: int) -> Iterator[PointSet]:
    for middle in itertools.combinations(range(1, top), 2):
        yield PointSet((0,) + middle + (top,))


def counterexample_family(
    L: int, budget: Optional[SearchBudget] = None
) -> tuple[PointSet, PointSet, Mapping]:
    """First four-point pair, in canonical order, with a non-monotone ``(3, 0, 0)``
    witness whose best monotone constant is exactly ``L``.

    Pairs are ordered by their largest value, then lexicographically.
    """

    budget = budget or SearchBudget()
    target = Fraction(L)
    below = target - Fraction(1, GRID_DENOMINATOR)
    loose = RiConstants(3, 0, 0)
    for top in range(3, budget.max_codomain_value + 1):
        sets = list(_four_point_sets(top))
        for A in sets:
            for B in sets:
                if exists_increasing_ri(A, B, RiConstants(target), budget) is None:
                    continue
                if below >= 1 and exists_increasing_ri(A, B, RiConstants(below), budget) is not None:
                    continue
                for T in enumerate_general_ri(A, B, loose, budget):
                    if not T.is_monotone():
                        logger.info(f"L={L}: found A={A.points} B={B.points} witness={T.image}")
                        return A, B, T
    raise NotFoundWithinBudgetError(f"no counterexample for L={L} with values up to {budget.max_codomain_value}")
