"""Game section of the run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..const import (
    DEFAULT_N_PLAYERS,
    DEFAULT_SIMPLEX_CAPACITY,
    DEFAULT_SIMPLEX_COUPLING,
    DEFAULT_SIMPLEX_DIMENSION,
    GAME_KIND_COURNOT,
    GAME_KINDS,
)
from .fields import count_field, kind_field, nonnegative_field, positive_field


@dataclass
class GameConfig:
    """Game configuration; dimension, coupling, capacity and amplitude apply to simplex_test only."""

    kind: str = kind_field("Built-in game", GAME_KINDS, default=GAME_KIND_COURNOT)
    n_players: int = count_field("Number of players N", minimum=2, default=DEFAULT_N_PLAYERS)
    horizon: int | None = count_field("Horizon T, must match run.horizon when given", minimum=1, optional=True)

    dimension: int = count_field("Simplex dimension of every player", minimum=1, default=DEFAULT_SIMPLEX_DIMENSION)
    coupling: float = nonnegative_field("Interaction scale q of Q = q I", default=DEFAULT_SIMPLEX_COUPLING)
    capacity: float = positive_field("Base per-player share of the first coordinate", default=DEFAULT_SIMPLEX_CAPACITY)
    amplitude: float | None = positive_field("Swing of the targets, defaults to 1/dimension", optional=True)
