"""Shared helpers for the subcommands: result output and instance loading."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Optional

from ..libs.seeding import U64_MASK
from ..libs.utils import dump_json, read_json, write_json
from ..models import ConstructionModel, InstanceModel

EXIT_OK = 0
EXIT_DOMAIN_FAILURE = 1
EXIT_USAGE = 2


def seed_value(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= U64_MASK:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def emit(payload: Any, out: Optional[Path] = None) -> None:
    """Write canonical JSON to ``out`` or to stdout."""

    if out is not None:
        write_json(out, payload)
    else:
        sys.stdout.write(dump_json(payload) + "\n")


def load_instance(path: Path) -> InstanceModel:
    """Read an instance file; ``construct`` output is accepted as well."""

    raw = read_json(path)
    if isinstance(raw, dict) and "instance" in raw and "A" not in raw:
        construction = ConstructionModel.model_validate(raw)
        if construction.instance is None:
            raise ValueError(f"{path} holds a failed construction without an instance")
        return construction.instance
    return InstanceModel.model_validate(raw)
