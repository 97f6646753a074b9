"""Nash-Cournot market game with seasonal prices and per-firm capacity shares."""

from __future__ import annotations

import logging

import numpy as np

from ..exceptions import ValidationError
from ..geometry import FeasibleSet
from .base import GameConstants, TimeVaryingGame

_LOGGER = logging.getLogger(__name__)

MIN_FIRMS = 2
PRODUCTION_LIMIT = 30.0
SEASON_PERIOD = 12.0


def season(t: int | np.ndarray) -> float | np.ndarray:
    """Return the seasonal factor sin(t / 12)."""
    return np.sin(np.asarray(t, dtype=float) / SEASON_PERIOD)


class CournotGame(TimeVaryingGame):
    """N firms choosing production levels x_i in [0, 30].

    Firm i (1-based k = i + 1) pays p_{i,t}(x_i) = x_i (s_t + 1) to produce and sells at
    price d_{i,t}(x) = 22 + k/9 - 0.5 k s_t - sum_j x_j, with s_t = sin(t/12). The
    market capacity couples the firms through sum_i (x_i - b_{i,t}) <= 0 with
    b_{i,t} = 10 + s_t.
    """

    affine_constraints = True

    def __init__(self, n_players: int = 20, horizon: int = 1, *, production_limit: float = PRODUCTION_LIMIT) -> None:
        """Initialize the market.

        Args:
            n_players: Number of firms N, at least 2
            horizon: Number of rounds T
            production_limit: Upper bound of every firm's production box

        """
        if n_players < MIN_FIRMS:
            msg = f"A Cournot market needs at least {MIN_FIRMS} firms, got {n_players}"
            raise ValidationError(msg)
        if not production_limit > 0.0:
            msg = f"Production limit must be positive, got {production_limit}"
            raise ValidationError(msg)

        super().__init__([FeasibleSet.box(0.0, production_limit)] * n_players, constraint_dim=1, horizon=horizon)
        self.production_limit = production_limit
        self._firms = np.arange(1, n_players + 1, dtype=float)

    def price_intercept(self, t: int) -> np.ndarray:
        """Return 22 + k/9 - 0.5 k s_t for every firm."""
        s = season(t)
        return 22.0 + self._firms / 9.0 - 0.5 * self._firms * s

    def capacity_share(self, t: int) -> float:
        """Return the per-firm capacity share b_{i,t} = 10 + s_t."""
        return float(10.0 + season(t))

    def cost(self, i: int, x: np.ndarray, t: int) -> float:
        """Production cost minus revenue of firm i."""
        s = float(season(t))
        x_i = float(x[i])
        return x_i * (s + 1.0) - x_i * (float(self.price_intercept(t)[i]) - float(np.sum(x)))

    def costs(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate every firm's cost at the profile x."""
        s = season(t)
        return x * (s + 1.0) - x * (self.price_intercept(t) - np.sum(x))

    def unilateral_costs(self, actions: np.ndarray, reference: np.ndarray, t: int) -> np.ndarray:
        """Evaluate J_{i,t}(a_i, r_{-i}) for every firm at once."""
        s = season(t)
        total = np.sum(reference) - reference + actions
        return actions * (s + 1.0) - actions * (self.price_intercept(t) - total)

    def gradient(self, i: int, x: np.ndarray, t: int) -> np.ndarray:
        """Return s_t + 1 - c_{i,t} + sum_j x_j + x_i."""
        return self.pseudo_gradient(x, t)[i : i + 1]

    def pseudo_gradient(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate all partial gradients at once."""
        s = season(t)
        return s + 1.0 - self.price_intercept(t) + np.sum(x) + x

    def constraint(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 identical for every firm
        """Return x_i - b_{i,t}."""
        return np.asarray(x_i, dtype=float) - self.capacity_share(t)

    def constraint_jacobian(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 constant
        """Return the 1 x 1 identity."""
        return np.ones((1, 1))

    def constraints(self, x: np.ndarray, t: int) -> np.ndarray:
        """Return the N x 1 matrix of local constraint values."""
        return (x - self.capacity_share(t))[:, np.newaxis]

    def aggregate_jacobian(self, x: np.ndarray, t: int) -> np.ndarray:  # noqa: ARG002 constant
        """Return the 1 x N row of ones."""
        return np.ones((1, self.n_players))

    def slater_point(self, t: int) -> np.ndarray:  # noqa: ARG002 zero production is always strictly feasible
        """Return zero production, where g_t(0) = -sum_i b_{i,t} < 0."""
        return np.zeros(self.n_players)

    def closed_form_constants(self) -> GameConstants:
        """Compute L and M by interval arithmetic over [0, limit]^N and t in [1, T].

        Every bounded quantity is monotone in x_i and in the market total S, so its
        extremes over the box are attained at the all-zero or all-limit corners.
        """
        limit = self.production_limit
        n = self.n_players
        s = season(np.arange(1, self.horizon + 1))[np.newaxis, :]
        firms = self._firms[:, np.newaxis]
        base = s + 1.0 - (22.0 + firms / 9.0 - 0.5 * firms * s)

        # Gradient base + S + x_i is increasing in both S in [0, N limit] and x_i in [0, limit]
        gradient_bound = float(np.max(np.maximum(np.abs(base), np.abs(base + n * limit + limit))))
        # J_i = x_i (base + S) with x_i in [0, limit]
        cost_bound = float(limit * np.max(np.maximum(np.abs(base), np.abs(base + n * limit))))
        shares = 10.0 + s
        constraint_bound = float(max(np.max(np.abs(-shares)), np.max(np.abs(limit - shares))))

        constants = GameConstants(
            L=max(limit, cost_bound, constraint_bound),
            M=max(gradient_bound, 1.0),
            H=float(np.sqrt(n + 3.0)),
            mu=1.0,
        )
        _LOGGER.debug("Cournot closed-form constants for N=%d T=%d: %s", n, self.horizon, constants)
        return constants


def cournot_game(n_players: int = 20, horizon: int = 1) -> CournotGame:
    """Build the Cournot benchmark game."""
    return CournotGame(n_players=n_players, horizon=horizon)
