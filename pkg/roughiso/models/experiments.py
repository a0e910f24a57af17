"""Experiment specifications and report cells."""
from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

from ..libs.seeding import U64_MASK


class ExperimentKind(str, Enum):
    SUCCESS_CURVE = "success_curve"
    RED_SEGMENT_TAILS = "red_segment_tails"
    COMB_TAILS = "comb_tails"
    E0_AND_EW = "e0_and_ew"
    BASELINE_COMPARISON = "baseline_comparison"
    OPTIMALITY_EVENT = "optimality_event"
    SUBSEGMENT_TAILS = "subsegment_tails"
    STAGE_SUCCESS = "stage_success"


class ExperimentSpec(BaseModel):
    """One experiment: a grid of cells, each run for ``trials`` seeded trials."""

    model_config = ConfigDict(extra="forbid")

    name: str
    kind: ExperimentKind
    grid: list[dict[str, Any]] = Field(..., min_length=1)
    trials: PositiveInt
    seed: int = Field(..., ge=0, le=U64_MASK)
    output: Optional[Path] = None
    jobs: Optional[PositiveInt] = None


class ReportCell(BaseModel):
    """Per-cell estimate with its exact 95% interval and failure taxonomy."""

    name: str
    kind: ExperimentKind
    cell: dict[str, Any]
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    failures: dict[str, int] = Field(default_factory=dict)
    extras: dict[str, Any] = Field(default_factory=dict)
    wall_time: float = 0.0
