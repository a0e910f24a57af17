"""Instance files read by the ``verify``, ``oracle`` and ``lattice`` commands."""
from __future__ import annotations

from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, Field

from .points import ConstantsModel, MappingModel, PointSetModel


class CheckKind(str, Enum):
    """Which verifier an instance is checked with."""

    RI = "ri"
    ROOTED = "rooted"
    INCREASING = "increasing"
    MARKOV = "markov"


class InstanceModel(BaseModel):
    A: PointSetModel
    B: PointSetModel
    constants: Optional[ConstantsModel] = None
    mapping: Optional[MappingModel] = None


class StageRecordModel(BaseModel):
    stage: int
    case: Optional[str] = None
    success: bool
    S: Optional[int] = None
    Y: Optional[int] = None
    Z: Optional[int] = None
    X: int = 0
    sub_counts: list[int] = Field(default_factory=list)
    P_A: int = 0
    P_B: int = 0
    L_A: int = 0
    L_B: int = 0
    reason: Optional[str] = None


class ConstructionModel(BaseModel):
    """Output of ``construct``: an instance plus the run summary."""

    success: bool
    params: dict[str, Any]
    seed: str
    instance: Optional[InstanceModel] = None
    failure_stage: Optional[int] = None
    failure_reason: Optional[str] = None


class LatticeDumpModel(BaseModel):
    A: list[int]
    B: list[int]
    constants: dict[str, str]
    elements: list[list[int]]
    hasse_edges: list[list[int]]
    covariance: Optional[str] = None
    samples: Optional[list[list[int]]] = None
