"""Time-varying games and the registry of named game kinds."""

from collections.abc import Callable
import logging

from ..const import GAME_KIND_COURNOT, GAME_KIND_SIMPLEX_TEST
from ..exceptions import ValidationError
from .base import (
    GameConstants,
    OracleGame,
    TimeVaryingGame,
    estimate_constants,
    gradient_check,
    jacobian_check,
)
from .cournot import CournotGame, cournot_game
from .simplex import SimplexTestGame, simplex_test_game

_LOGGER = logging.getLogger(__name__)

type GameFactory = Callable[..., TimeVaryingGame]

GAME_TYPES: dict[str, GameFactory] = {
    GAME_KIND_COURNOT: cournot_game,
    GAME_KIND_SIMPLEX_TEST: simplex_test_game,
}


def register_game(kind: str, factory: GameFactory) -> None:
    """Make a game factory available to create_game under a kind name."""
    if kind in GAME_TYPES:
        msg = f"Game kind {kind!r} is already registered"
        raise ValueError(msg)
    GAME_TYPES[kind] = factory
    _LOGGER.debug("Registered game kind %s", kind)


def create_game(kind: str, **kwargs: object) -> TimeVaryingGame:
    """Create a game of a registered kind.

    Raises:
        ValidationError: If the kind is unknown

    """
    if kind not in GAME_TYPES:
        msg = f"Unknown game kind: {kind}"
        raise ValidationError(msg)
    return GAME_TYPES[kind](**kwargs)


__all__ = [
    "GAME_TYPES",
    "CournotGame",
    "GameConstants",
    "OracleGame",
    "SimplexTestGame",
    "TimeVaryingGame",
    "cournot_game",
    "create_game",
    "estimate_constants",
    "gradient_check",
    "jacobian_check",
    "register_game",
    "simplex_test_game",
]
