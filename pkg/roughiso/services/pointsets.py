"""Point configurations on the line and maps between them."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from ..libs.exceptions import DomainMismatchError, ImageNotInCodomainError

Number = Union[int, Fraction]

# Sampled real points are dyadic with this many fractional bits.
REAL_UNIT_BITS = 64


def _check_increasing(values: Sequence[Number], what: str) -> None:
    for index in range(1, len(values)):
        if values[index] <= values[index - 1]:
            raise ValueError(
                f"{what} must be strictly increasing; "
                f"index {index} has {values[index]} after {values[index - 1]}"
            )
    if values and values[0] < 0:
        raise ValueError(f"{what} must be non-negative, got {values[0]}")


@dataclass(frozen=True)
class PointSet:
    """Finite integer point configuration with an optional root at 0."""

    points: tuple[int, ...]
    rooted: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(int(p) for p in self.points))
        _check_increasing(self.points, "points")
        if self.rooted and (not self.points or self.points[0] != 0):
            raise ValueError("a rooted point set must start at 0")

    @classmethod
    def from_gaps(cls, gaps: Iterable[int], start: int = 0) -> "PointSet":
        values = [start]
        for gap in gaps:
            if gap < 1:
                raise ValueError(f"gaps must be at least 1, got {gap}")
            values.append(values[-1] + int(gap))
        return cls(tuple(values), rooted=start == 0)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, value: object) -> bool:
        if not isinstance(value, int):
            return False
        index = bisect.bisect_left(self.points, value)
        return index < len(self.points) and self.points[index] == value

    def __getitem__(self, index: int) -> int:
        return self.points[index]

    @property
    def gaps(self) -> tuple[int, ...]:
        """Gap view: ``G(i) = points[i] - points[i - 1]`` for ``i >= 1``."""

        return tuple(b - a for a, b in zip(self.points, self.points[1:]))

    def gap_array(self) -> np.ndarray:
        return np.diff(np.asarray(self.points, dtype=np.int64))

    def index_of(self, value: int) -> int:
        index = bisect.bisect_left(self.points, value)
        if index == len(self.points) or self.points[index] != value:
            raise KeyError(value)
        return index

    def prefix(self, count: int) -> "PointSet":
        """First ``count`` points."""

        return PointSet(self.points[:count], rooted=self.rooted)

    def upto(self, bound: int) -> "PointSet":
        """Points not exceeding ``bound``."""

        stop = bisect.bisect_right(self.points, bound)
        return PointSet(self.points[:stop], rooted=self.rooted)

    def window(self, low: int, high: int) -> "PointSet":
        """Points in ``[low, high]`` translated to start at 0."""

        start = bisect.bisect_left(self.points, low)
        stop = bisect.bisect_right(self.points, high)
        chunk = self.points[start:stop]
        if not chunk:
            return PointSet((), rooted=False)
        return PointSet(tuple(p - chunk[0] for p in chunk), rooted=True)

    def as_dict(self) -> dict[str, object]:
        return {"rooted": self.rooted, "points": list(self.points)}


@dataclass(frozen=True)
class RealPointSet:
    """Finite configuration of non-negative rationals.

    Sampled sets are dyadic with denominator ``2**REAL_UNIT_BITS``; rescaled
    sets keep the exact image of that grid and may carry other denominators.
    """

    points: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(Fraction(p) for p in self.points))
        _check_increasing(self.points, "points")

    @classmethod
    def from_units(cls, units: Iterable[int], unit_bits: int = REAL_UNIT_BITS) -> "RealPointSet":
        denominator = 1 << unit_bits
        return cls(tuple(Fraction(int(u), denominator) for u in units))

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, value: object) -> bool:
        if not isinstance(value, (int, Fraction)):
            return False
        index = bisect.bisect_left(self.points, value)
        return index < len(self.points) and self.points[index] == value

    def as_dict(self) -> dict[str, object]:
        return {"points": [f"{p.numerator}/{p.denominator}" for p in self.points]}


AnyPointSet = Union[PointSet, RealPointSet]


@dataclass(frozen=True)
class Mapping:
    """A map ``T: domain -> codomain`` stored as a domain-aligned image list."""

    domain: tuple[Number, ...]
    image: tuple[Number, ...]
    codomain: tuple[Number, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "image", tuple(self.image))
        object.__setattr__(self, "codomain", tuple(self.codomain))
        if len(self.domain) != len(self.image):
            raise ValueError(
                f"image has {len(self.image)} entries for {len(self.domain)} domain points"
            )

    @classmethod
    def between(cls, A: AnyPointSet, B: AnyPointSet, image: Iterable[Number]) -> "Mapping":
        return cls(A.points, tuple(image), B.points)

    @classmethod
    def identity(cls, A: AnyPointSet) -> "Mapping":
        return cls(A.points, A.points, A.points)

    def __len__(self) -> int:
        return len(self.domain)

    def __call__(self, x: Number) -> Number:
        index = bisect.bisect_left(self.domain, x)
        if index == len(self.domain) or self.domain[index] != x:
            raise KeyError(x)
        return self.image[index]

    def check_codomain(self) -> None:
        """Raise :class:`ImageNotInCodomainError` for the first stray image value."""

        for index, value in enumerate(self.image):
            position = bisect.bisect_left(self.codomain, value)
            if position == len(self.codomain) or self.codomain[position] != value:
                raise ImageNotInCodomainError(
                    f"T({self.domain[index]}) = {value} is not a codomain point"
                )

    def check_against(self, A: AnyPointSet, B: AnyPointSet) -> None:
        if tuple(A.points) != self.domain:
            raise DomainMismatchError("mapping domain differs from the given point set")
        if tuple(B.points) != self.codomain:
            raise DomainMismatchError("mapping codomain differs from the given point set")
        self.check_codomain()

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.image, self.image[1:]))

    def prefix(self, count: int) -> "Mapping":
        return Mapping(self.domain[:count], self.image[:count], self.codomain)

    def with_codomain(self, codomain: Sequence[Number]) -> "Mapping":
        return Mapping(self.domain, self.image, tuple(codomain))

    def as_dict(self) -> dict[str, object]:
        def encode(value: Number) -> object:
            if isinstance(value, Fraction) and value.denominator != 1:
                return f"{value.numerator}/{value.denominator}"
            return int(value)

        return {
            "domain": [encode(v) for v in self.domain],
            "image": [encode(v) for v in self.image],
            "codomain": [encode(v) for v in self.codomain],
        }
