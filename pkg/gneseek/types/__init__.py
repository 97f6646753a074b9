"""Run configuration type system with field-based metadata."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..const import CONF_GAME, CONF_GEOMETRY, CONF_GRAPH, CONF_RUN, CONF_SCHEDULE
from .game import GameConfig
from .geometry import GeometryConfig
from .graph import GraphConfig
from .run import RunSettings
from .schedule import ScheduleConfig

# Configuration sections in file order
SECTION_TYPES: dict[str, type] = {
    CONF_GAME: GameConfig,
    CONF_GRAPH: GraphConfig,
    CONF_GEOMETRY: GeometryConfig,
    CONF_SCHEDULE: ScheduleConfig,
    CONF_RUN: RunSettings,
}


@dataclass
class RunConfig:
    """Validated run configuration together with the text it was parsed from."""

    game: GameConfig
    graph: GraphConfig
    geometry: GeometryConfig
    schedule: ScheduleConfig
    run: RunSettings
    source: Path | None = None
    text: str = ""


__all__ = [
    "SECTION_TYPES",
    "GameConfig",
    "GeometryConfig",
    "GraphConfig",
    "RunConfig",
    "RunSettings",
    "ScheduleConfig",
]
