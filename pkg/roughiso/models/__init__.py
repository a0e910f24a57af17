"""Data models (Pydantic) for the command-line I/O formats."""

from .experiments import ExperimentKind, ExperimentSpec, ReportCell
from .instances import (
    CheckKind,
    ConstructionModel,
    InstanceModel,
    LatticeDumpModel,
    StageRecordModel,
)
from .points import (
    ConstantsModel,
    MappingModel,
    PointSetModel,
    RealPointSetModel,
    ViolationModel,
)

__all__ = [
    "CheckKind",
    "ConstantsModel",
    "ConstructionModel",
    "ExperimentKind",
    "ExperimentSpec",
    "InstanceModel",
    "LatticeDumpModel",
    "MappingModel",
    "PointSetModel",
    "RealPointSetModel",
    "ReportCell",
    "StageRecordModel",
    "ViolationModel",
]
