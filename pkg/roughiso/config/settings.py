"""Loading of ``conf/settings.yaml``: search budget and experiment defaults."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = Path("conf/settings.yaml")


class SettingsError(RuntimeError):
    """Raised when the settings file is missing or malformed."""


@dataclass(slots=True, frozen=True)
class ProjectSettings:
    SEARCH_BUDGET: dict[str, Any] = field(default_factory=dict)
    EXPERIMENT_DEFAULTS: dict[str, Any] = field(default_factory=dict)


def _section(raw: Mapping[str, Any], name: str) -> dict[str, Any]:
    value = raw.get(name)
    if value is None:
        return {}
    if not isinstance(value, Mapping):
        raise SettingsError(f"Settings field '{name}' must be a mapping, got {type(value).__name__}")
    return dict(value)


def load_settings(path: str | Path = DEFAULT_SETTINGS_PATH) -> ProjectSettings:
    """Read the two known sections; keys are case-insensitive, others are ignored."""

    settings_path = Path(path)
    if not settings_path.exists():
        raise SettingsError(f"Settings file not found: {settings_path!s}")
    try:
        raw = yaml.safe_load(settings_path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise SettingsError(f"Failed to parse settings file: {exc}") from exc
    if not isinstance(raw, Mapping):
        raise SettingsError("Top-level settings structure must be a mapping")

    normalized = {str(key).upper(): value for key, value in raw.items()}
    unknown = sorted(set(normalized) - {"SEARCH_BUDGET", "EXPERIMENT_DEFAULTS"})
    if unknown:
        logger.warning(f"ignoring unknown settings keys {unknown} in {settings_path}")
    return ProjectSettings(
        SEARCH_BUDGET=_section(normalized, "SEARCH_BUDGET"),
        EXPERIMENT_DEFAULTS=_section(normalized, "EXPERIMENT_DEFAULTS"),
    )


def load_settings_or_default(path: str | Path = DEFAULT_SETTINGS_PATH) -> ProjectSettings:
    """Like :func:`load_settings` but falls back to defaults when the file is absent."""

    if not Path(path).exists():
        return ProjectSettings()
    return load_settings(path)
