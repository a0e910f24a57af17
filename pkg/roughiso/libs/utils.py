"""Utility helpers for rationals and result files."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping


def ensure_directory(path: Path) -> Path:
    """Create *path* (and parents) if necessary and return it."""

    path.mkdir(parents=True, exist_ok=True)
    return path


def parse_rational(value: Any) -> Fraction:
    """Parse ``"num/den"``, integers or decimal strings into a :class:`Fraction`.

    Floats are rejected so that no binary rounding leaks into constants.
    """

    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"invalid rational '{value}'") from exc
    raise ValueError(f"expected a rational string or integer, got {type(value).__name__}")


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def dump_json(payload: Any) -> str:
    """Canonical JSON text: sorted keys, compact separators."""

    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def write_json(path: Path, payload: Any) -> Path:
    ensure_directory(path.parent)
    path.write_text(dump_json(payload) + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_ndjson(path: Path, records: Iterable[Mapping[str, Any]]) -> Path:
    ensure_directory(path.parent)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dump_json(record) + "\n")
    return path


def read_ndjson(path: Path) -> list[dict[str, Any]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]
