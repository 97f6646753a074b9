"""Graph section of the run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..const import GRAPH_KIND_RING, GRAPH_KINDS
from .fields import edges_field, fraction_field, kind_field


@dataclass
class GraphConfig:
    """Communication graph configuration."""

    kind: str = kind_field("Topology", GRAPH_KINDS, default=GRAPH_KIND_RING)
    edges: list[list[int]] | None = edges_field("Explicit 1-based edges, required for kind 'edges'")
    laziness: float = fraction_field("Extra self weight added to the Metropolis weights", default=0.0)
