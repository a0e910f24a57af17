"""Wire models for point sets, mappings, constants and violations."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..libs.utils import format_rational, parse_rational
from ..services.pointsets import Mapping, Number, PointSet, RealPointSet
from ..services.verify import MarkovConstants, RiConstants, Violation

Rational = Union[int, str]


def _to_number(value: Rational) -> Number:
    parsed = parse_rational(value)
    return parsed.numerator if parsed.denominator == 1 else parsed


def _from_number(value: Number) -> Rational:
    return format_rational(value) if isinstance(value, Fraction) and value.denominator != 1 else int(value)


class PointSetModel(BaseModel):
    """Integer point set; ``rooted`` sets start at 0."""

    points: list[int]
    rooted: bool = True

    def to_domain(self) -> PointSet:
        return PointSet(tuple(self.points), rooted=self.rooted)

    @classmethod
    def from_domain(cls, value: PointSet) -> "PointSetModel":
        return cls(points=list(value.points), rooted=value.rooted)


class RealPointSetModel(BaseModel):
    points: list[str]

    def to_domain(self) -> RealPointSet:
        return RealPointSet(tuple(parse_rational(p) for p in self.points))

    @classmethod
    def from_domain(cls, value: RealPointSet) -> "RealPointSetModel":
        return cls(points=[format_rational(p) for p in value.points])


class MappingModel(BaseModel):
    domain: list[Rational]
    image: list[Rational]
    codomain: list[Rational]

    def to_domain(self) -> Mapping:
        return Mapping(
            tuple(_to_number(v) for v in self.domain),
            tuple(_to_number(v) for v in self.image),
            tuple(_to_number(v) for v in self.codomain),
        )

    @classmethod
    def from_domain(cls, value: Mapping) -> "MappingModel":
        return cls(
            domain=[_from_number(v) for v in value.domain],
            image=[_from_number(v) for v in value.image],
            codomain=[_from_number(v) for v in value.codomain],
        )


class ConstantsModel(BaseModel):
    """Rational constants written as ``"num/den"`` strings or integers.

    ``D`` belongs to rough isometries and ``F`` to Markov rough isometries.
    """

    model_config = ConfigDict(extra="forbid")

    M: Rational
    D: Optional[Rational] = None
    F: Optional[Rational] = None
    R: Rational = 0

    @field_validator("M", "D", "F", "R")
    @classmethod
    def _rational(cls, value: Optional[Rational]) -> Optional[Rational]:
        if value is not None:
            parse_rational(value)
        return value

    def ri(self) -> RiConstants:
        return RiConstants(parse_rational(self.M), parse_rational(self.D or 0), parse_rational(self.R))

    def markov(self) -> MarkovConstants:
        return MarkovConstants(parse_rational(self.M), parse_rational(self.F or 0), parse_rational(self.R))

    @classmethod
    def from_domain(cls, value: Union[RiConstants, MarkovConstants]) -> "ConstantsModel":
        if isinstance(value, MarkovConstants):
            return cls(M=format_rational(value.M), F=format_rational(value.F), R=format_rational(value.R))
        return cls(M=format_rational(value.M), D=format_rational(value.D), R=format_rational(value.R))


class ViolationModel(BaseModel):
    kind: str
    witness: list[str] = Field(default_factory=list)
    indices: list[int] = Field(default_factory=list)

    @classmethod
    def from_domain(cls, value: Violation) -> "ViolationModel":
        return cls(**value.as_dict())
