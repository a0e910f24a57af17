"""Pointwise join/meet algebra on rooted increasing rough isometries."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..libs.exceptions import DomainMismatchError, LatticeClosureError
from ..libs.seeding import Seed
from .oracle import SearchBudget, enumerate_increasing_ri, enumerate_markov_ri
from .pointsets import AnyPointSet, Mapping, Number
from .verify import MarkovConstants, RiConstants

logger = logging.getLogger(__name__)


def _same_shape(T1: Mapping, T2: Mapping) -> None:
    if T1.domain != T2.domain or T1.codomain != T2.codomain:
        raise DomainMismatchError("maps must share domain and codomain")


def join(T1: Mapping, T2: Mapping) -> Mapping:
    _same_shape(T1, T2)
    return Mapping(T1.domain, tuple(max(u, v) for u, v in zip(T1.image, T2.image)), T1.codomain)


def meet(T1: Mapping, T2: Mapping) -> Mapping:
    _same_shape(T1, T2)
    return Mapping(T1.domain, tuple(min(u, v) for u, v in zip(T1.image, T2.image)), T1.codomain)


def precedes(T1: Mapping, T2: Mapping) -> bool:
    """Pointwise order ``T1 <= T2``."""

    _same_shape(T1, T2)
    return all(u <= v for u, v in zip(T1.image, T2.image))


def axioms_hold(x: Mapping, y: Mapping, z: Mapping) -> bool:
    """Idempotence, commutativity, associativity, absorption and distributivity on one triple."""

    return (
        join(x, x) == x
        and meet(x, x) == x
        and join(x, y) == join(y, x)
        and meet(x, y) == meet(y, x)
        and join(join(x, y), z) == join(x, join(y, z))
        and meet(meet(x, y), z) == meet(x, meet(y, z))
        and join(x, meet(x, y)) == x
        and meet(x, join(x, y)) == x
        and meet(x, join(y, z)) == join(meet(x, y), meet(x, z))
    )


@dataclass
class RiLattice:
    A: AnyPointSet
    B: AnyPointSet
    constants: RiConstants
    elements: list[Mapping]
    hasse_edges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def minimum(self) -> Mapping:
        return self.elements[0]

    @property
    def maximum(self) -> Mapping:
        return self.elements[-1]

    def __len__(self) -> int:
        return len(self.elements)

    def sample(self, seed: Seed, size: int = 1) -> list[Mapping]:
        """Draw ``size`` elements independently and uniformly."""

        picks = seed.child("lattice").generator().integers(0, len(self.elements), size=size)
        return [self.elements[int(k)] for k in picks]

    def as_dict(self) -> dict[str, object]:
        return {
            "A": list(self.A.points),
            "B": list(self.B.points),
            "constants": self.constants.as_dict(),
            "elements": [[int(v) for v in T.image] for T in self.elements],
            "hasse_edges": [list(edge) for edge in self.hasse_edges],
        }


def _check_closure(elements: list[Mapping]) -> None:
    known = {T.image for T in elements}
    for T1, T2 in itertools.combinations(elements, 2):
        for combined, name in ((join(T1, T2), "join"), (meet(T1, T2), "meet")):
            if combined.image not in known:
                raise LatticeClosureError(f"{name} of {T1.image} and {T2.image} is not an element")


def hasse_edges(elements: list[Mapping]) -> list[tuple[int, int]]:
    """Covering pairs ``(i, j)``: ``elements[i] < elements[j]`` with nothing in between."""

    count = len(elements)
    below = [[i != j and precedes(elements[i], elements[j]) for j in range(count)] for i in range(count)]
    edges = []
    for i in range(count):
        for j in range(count):
            if below[i][j] and not any(below[i][k] and below[k][j] for k in range(count)):
                edges.append((i, j))
    return edges


def build_lattice(
    A: AnyPointSet,
    B: AnyPointSet,
    c: RiConstants,
    budget: Optional[SearchBudget] = None,
    triples: int = 64,
    seed: Optional[Seed] = None,
) -> Optional[RiLattice]:
    """Enumerate the rooted increasing rough isometries and check the lattice laws.

    Returns ``None`` for an empty family.  Closure is checked on every pair,
    distributivity on ``triples`` sampled triples.
    """

    elements = enumerate_increasing_ri(A, B, c, budget)
    if not elements:
        return None
    _check_closure(elements)
    rng = (seed or Seed(0)).child("triples").generator()
    for _ in range(triples):
        x, y, z = (elements[int(k)] for k in rng.integers(0, len(elements), size=3))
        if meet(x, join(y, z)) != join(meet(x, y), meet(x, z)):
            raise LatticeClosureError(f"distributivity fails on {x.image}, {y.image}, {z.image}")
    lattice = RiLattice(A, B, c, elements, hasse_edges(elements))
    if any(not precedes(lattice.minimum, T) or not precedes(T, lattice.maximum) for T in elements):
        raise LatticeClosureError("lexicographic extremes are not the lattice extremes")
    logger.debug(f"lattice with {len(elements)} elements and {len(lattice.hasse_edges)} covering pairs")
    return lattice


def fkg_check(lat: RiLattice, x: Number, y: Number) -> Fraction:
    """Exact covariance of ``T(x)`` and ``T(y)`` under the uniform measure on the lattice."""

    count = len(lat.elements)
    sx = sum((Fraction(T(x)) for T in lat.elements), Fraction(0))
    sy = sum((Fraction(T(y)) for T in lat.elements), Fraction(0))
    sxy = sum((Fraction(T(x)) * Fraction(T(y)) for T in lat.elements), Fraction(0))
    return sxy / count - (sx / count) * (sy / count)


def markov_closure_holds(
    A: AnyPointSet, B: AnyPointSet, mc: MarkovConstants, budget: Optional[SearchBudget] = None
) -> bool:
    """Whether the Markov rough isometries ``A -> B`` are closed under join and meet."""

    elements = enumerate_markov_ri(A, B, mc, budget)
    try:
        _check_closure(elements)
    except LatticeClosureError as exc:
        logger.warning(f"markov family not closed: {exc}")
        return False
    return True
