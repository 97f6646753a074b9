"""Build runtime objects from a validated run configuration."""

from __future__ import annotations

import logging

import numpy as np

from .const import GAME_KIND_SIMPLEX_TEST
from .engine import StepSchedule
from .game import TimeVaryingGame, create_game
from .geometry import BregmanGeometry, make_geometries
from .graph import GraphTopology, build_topology
from .types import RunConfig

_LOGGER = logging.getLogger(__name__)


def build_game(config: RunConfig) -> TimeVaryingGame:
    """Create the configured game over run.horizon rounds."""
    game_config = config.game
    kwargs: dict[str, object] = {"n_players": game_config.n_players, "horizon": config.run.horizon}
    if game_config.kind == GAME_KIND_SIMPLEX_TEST:
        kwargs.update(
            dimension=game_config.dimension,
            coupling=game_config.coupling,
            capacity=game_config.capacity,
            amplitude=game_config.amplitude,
        )
    game = create_game(game_config.kind, **kwargs)
    _LOGGER.debug("Built %s game with %d players and dimension %d", game_config.kind, game.n_players, game.dimension)
    return game


def build_graph(config: RunConfig) -> GraphTopology:
    """Create the communication topology; configured edges are 1-based."""
    graph_config = config.graph
    edges = None
    if graph_config.edges is not None:
        edges = [(u - 1, v - 1) for u, v in graph_config.edges]
    topology = build_topology(
        graph_config.kind,
        config.game.n_players,
        edges=edges,
        laziness=graph_config.laziness,
    )
    _LOGGER.debug("Built %s graph: sigma %.6g, sigma_m %.6g", graph_config.kind, topology.sigma, topology.sigma_m)
    return topology


def build_geometries(config: RunConfig, game: TimeVaryingGame) -> list[BregmanGeometry]:
    """Create one mirror map per player, seeding any sampled Lipschitz estimates."""
    rng = np.random.default_rng(config.run.seed)
    return make_geometries(config.geometry.kind, game.feasible_sets, rng=rng)


def build_schedule(config: RunConfig) -> StepSchedule:
    """Create the step-size schedule for run.horizon rounds."""
    return StepSchedule(a1=config.schedule.a1, a2=config.schedule.a2, horizon=config.run.horizon)
