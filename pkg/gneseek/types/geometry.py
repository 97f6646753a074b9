"""Geometry section of the run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..const import GEOMETRY_KIND_EUCLIDEAN, GEOMETRY_KINDS
from .fields import kind_field


@dataclass
class GeometryConfig:
    """Mirror map configuration."""

    kind: str = kind_field("Mirror map", GEOMETRY_KINDS, default=GEOMETRY_KIND_EUCLIDEAN)
