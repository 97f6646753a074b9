"""Test configuration and fixtures."""

import numpy as np
import pytest

from gneseek.engine import StepSchedule
from gneseek.game import CournotGame, SimplexTestGame
from gneseek.graph import GraphTopology, build_topology

SMALL_FIRMS = 4
SMALL_HORIZON = 40


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator shared by randomized tests."""
    return np.random.default_rng(12345)


@pytest.fixture
def cournot() -> CournotGame:
    """Cournot game with a handful of firms over a short horizon."""
    return CournotGame(n_players=SMALL_FIRMS, horizon=SMALL_HORIZON)


@pytest.fixture
def simplex_game() -> SimplexTestGame:
    """Simplex game matching the Cournot fixture's size."""
    return SimplexTestGame(n_players=SMALL_FIRMS, horizon=SMALL_HORIZON)


@pytest.fixture
def ring() -> GraphTopology:
    """Metropolis ring over the fixture players."""
    return build_topology("ring", SMALL_FIRMS)


@pytest.fixture
def schedule() -> StepSchedule:
    """Schedule with the reproduction exponents over the fixture horizon."""
    return StepSchedule(a1=0.2, a2=0.8, horizon=SMALL_HORIZON)
