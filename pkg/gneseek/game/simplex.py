"""Quadratic game on probability simplices, used to exercise the entropy geometry."""

from __future__ import annotations

import numpy as np

from ..exceptions import ValidationError
from ..geometry import FeasibleSet
from .base import TimeVaryingGame

SEASON_PERIOD = 12.0
CAPACITY_SWING = 0.25


class SimplexTestGame(TimeVaryingGame):
    """Players place a probability vector near a drifting target.

    J_{i,t}(x) = 0.5 ||x_i - c_{i,t}||^2 + x_i^T Q xbar_{-i}, where xbar_{-i} is the average
    of the other players' actions and Q = coupling * I. The coupled constraint caps
    the total mass on the first coordinate: sum_i (x_i[0] - r_t) <= 0 with
    r_t = capacity (1 + 0.25 sin(t/12)).
    """

    affine_constraints = True

    def __init__(
        self,
        n_players: int = 20,
        horizon: int = 1,
        *,
        dimension: int = 3,
        coupling: float = 0.2,
        capacity: float = 0.3,
        amplitude: float | None = None,
    ) -> None:
        """Initialize the game.

        Args:
            n_players: Number of players N
            horizon: Number of rounds T
            dimension: Simplex dimension n of every player
            coupling: Scale q of the interaction matrix Q = q I, non-negative
            capacity: Base per-player share of the first coordinate
            amplitude: Swing of the targets around the uniform point, defaults to 1/n

        """
        if dimension < 1:
            msg = f"Simplex dimension must be positive, got {dimension}"
            raise ValidationError(msg)
        if coupling < 0.0:
            msg = f"Coupling must be non-negative, got {coupling}"
            raise ValidationError(msg)
        if capacity <= 0.0:
            msg = f"Capacity must be positive, got {capacity}"
            raise ValidationError(msg)

        super().__init__([FeasibleSet.simplex(dimension)] * n_players, constraint_dim=1, horizon=horizon)
        self.simplex_dimension = dimension
        self.coupling = coupling
        self.capacity = capacity
        self.amplitude = 1.0 / dimension if amplitude is None else amplitude

        players = np.arange(n_players)[:, np.newaxis]
        coordinates = np.arange(dimension)[np.newaxis, :]
        self._phases = 2.0 * np.pi * (players + coordinates) / dimension
        self._first = np.zeros(dimension)
        self._first[0] = 1.0

    def _reshape(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float).reshape(self.n_players, self.simplex_dimension)

    def targets(self, t: int) -> np.ndarray:
        """Return the N x n matrix of targets c_{i,t}; every row sums to 1."""
        if self.simplex_dimension == 1:
            return np.ones((self.n_players, 1))
        return 1.0 / self.simplex_dimension + self.amplitude * np.sin(t / SEASON_PERIOD + self._phases)

    def capacity_at(self, t: int) -> float:
        """Return the per-player share r_t of the first coordinate."""
        return float(self.capacity * (1.0 + CAPACITY_SWING * np.sin(t / SEASON_PERIOD)))

    def _others_average(self, actions: np.ndarray) -> np.ndarray:
        if self.n_players == 1:
            return np.zeros_like(actions)
        return (actions.sum(axis=0) - actions) / (self.n_players - 1)

    def costs(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate every player's cost."""
        return self.unilateral_costs(x, x, t)

    def cost(self, i: int, x: np.ndarray, t: int) -> float:
        """Evaluate J_{i,t} at the stacked profile x."""
        return float(self.costs(x, t)[i])

    def unilateral_costs(self, actions: np.ndarray, reference: np.ndarray, t: int) -> np.ndarray:
        """Evaluate J_{i,t}(a_i, r_{-i}) for every player at once."""
        own = self._reshape(actions)
        others = self._others_average(self._reshape(reference))
        offset = own - self.targets(t)
        return 0.5 * np.sum(offset**2, axis=1) + self.coupling * np.sum(own * others, axis=1)

    def pseudo_gradient(self, x: np.ndarray, t: int) -> np.ndarray:
        """Return the stacked x_i - c_{i,t} + Q xbar_{-i}."""
        actions = self._reshape(x)
        return (actions - self.targets(t) + self.coupling * self._others_average(actions)).reshape(-1)

    def gradient(self, i: int, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the partial gradient of player i."""
        return self.pseudo_gradient(x, t)[self.slices[i]]

    def constraint(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 identical for every player
        """Return x_i[0] - r_t."""
        return np.array([float(x_i[0]) - self.capacity_at(t)])

    def constraint_jacobian(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 constant
        """Return the first unit row vector."""
        return self._first[np.newaxis, :].copy()

    def constraints(self, x: np.ndarray, t: int) -> np.ndarray:
        """Return the N x 1 matrix of local constraint values."""
        return (self._reshape(x)[:, 0] - self.capacity_at(t))[:, np.newaxis]

    def aggregate_jacobian(self, x: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 constant
        """Return the 1 x (N n) row selecting every first coordinate."""
        return np.tile(self._first, self.n_players)[np.newaxis, :]

    def slater_point(self, t: int) -> np.ndarray:  # noqa: ARG002 the point does not move
        """Put every player's mass on the last coordinate."""
        point = np.zeros((self.n_players, self.simplex_dimension))
        point[:, -1] = 1.0
        return point.reshape(-1)


def simplex_test_game(
    n_players: int = 20,
    horizon: int = 1,
    *,
    dimension: int = 3,
    coupling: float = 0.2,
    capacity: float = 0.3,
    amplitude: float | None = None,
) -> SimplexTestGame:
    """Build the simplex test game."""
    return SimplexTestGame(
        n_players=n_players,
        horizon=horizon,
        dimension=dimension,
        coupling=coupling,
        capacity=capacity,
        amplitude=amplitude,
    )
