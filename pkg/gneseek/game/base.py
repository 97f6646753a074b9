"""Time-varying game model shared by all built-in and user supplied games."""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
import logging
from typing import NamedTuple

import numpy as np

from ..const import DEFAULT_CONSTANT_SAMPLES, SAMPLED_CONSTANT_INFLATION
from ..exceptions import AssumptionViolation, ValidationError
from ..geometry import FeasibleSet, ProductSet

_LOGGER = logging.getLogger(__name__)


class GameConstants(NamedTuple):
    """Bound constants of a game.

    L bounds ||x_i||, |J_i| and ||g_i|| over the feasible sets, M bounds the partial
    gradients and constraint Jacobians, H is the per-player gradient Lipschitz constant
    and mu the strong monotonicity modulus of the pseudo-gradient.
    """

    L: float
    M: float
    H: float
    mu: float


class TimeVaryingGame(ABC):
    """Noncooperative game with time-varying costs and a separable coupled constraint.

    Actions of all players are handled as one stacked vector x whose block i (see
    ``slices``) holds x_i. Oracles are total functions so they can be evaluated at
    estimate vectors that lie outside the feasible sets. Rounds are 1-based.
    """

    # Whether every g_{i,t} is affine in x_i, which makes the Slater check an LP
    affine_constraints: bool = False

    def __init__(self, feasible_sets: Sequence[FeasibleSet], constraint_dim: int, horizon: int) -> None:
        """Initialize the game structure.

        Args:
            feasible_sets: Per-player feasible sets Omega_i
            constraint_dim: Dimension m of the coupled constraint
            horizon: Number of rounds T

        """
        if not feasible_sets:
            msg = "A game needs at least one player"
            raise ValidationError(msg)
        if constraint_dim < 1:
            msg = f"Constraint dimension must be positive, got {constraint_dim}"
            raise ValidationError(msg)
        if horizon < 1:
            msg = f"Horizon must be at least 1, got {horizon}"
            raise ValidationError(msg)

        self.feasible_sets = tuple(feasible_sets)
        self.product = ProductSet(self.feasible_sets)
        self.slices = self.product.slices
        self.n_players = len(self.feasible_sets)
        self.action_dims = tuple(s.dimension for s in self.feasible_sets)
        self.dimension = self.product.dimension
        self.constraint_dim = constraint_dim
        self.horizon = horizon

    @abstractmethod
    def cost(self, i: int, x: np.ndarray, t: int) -> float:
        """Evaluate J_{i,t} at the stacked profile x."""

    @abstractmethod
    def gradient(self, i: int, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the partial gradient of J_{i,t} with respect to x_i."""

    @abstractmethod
    def constraint(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the local constraint g_{i,t}(x_i) in R^m."""

    @abstractmethod
    def constraint_jacobian(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the m x n_i Jacobian of g_{i,t} at x_i."""

    def costs(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate every player's cost at the profile x."""
        return np.array([self.cost(i, x, t) for i in range(self.n_players)])

    def unilateral_costs(self, actions: np.ndarray, reference: np.ndarray, t: int) -> np.ndarray:
        """Evaluate J_{i,t}(a_i, r_{-i}) for every player i.

        Args:
            actions: Stacked actions a whose block i is substituted for player i
            reference: Stacked reference profile r for the other players
            t: Round index

        """
        values = np.empty(self.n_players)
        for i, sl in enumerate(self.slices):
            profile = reference.copy()
            profile[sl] = actions[sl]
            values[i] = self.cost(i, profile, t)
        return values

    def pseudo_gradient(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate F_t(x), the stack of every player's partial gradient."""
        return np.concatenate([self.gradient(i, x, t) for i in range(self.n_players)])

    def constraints(self, x: np.ndarray, t: int) -> np.ndarray:
        """Return the N x m matrix of local constraint values g_{i,t}(x_i)."""
        return np.stack([self.constraint(i, x[sl], t) for i, sl in enumerate(self.slices)])

    def aggregate_constraint(self, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the coupled constraint g_t(x) = sum_i g_{i,t}(x_i)."""
        return self.constraints(x, t).sum(axis=0)

    def aggregate_jacobian(self, x: np.ndarray, t: int) -> np.ndarray:
        """Return the m x n Jacobian of g_t at the stacked profile x."""
        return np.hstack([self.constraint_jacobian(i, x[sl], t) for i, sl in enumerate(self.slices)])

    def closed_form_constants(self) -> GameConstants | None:
        """Return analytic bound constants when the game has them."""
        return None

    def slater_point(self, t: int) -> np.ndarray | None:  # noqa: ARG002 subclasses use the round
        """Return a stacked point expected to satisfy g_t(x) < 0 strictly, if known."""
        return None


class OracleGame(TimeVaryingGame):
    """Game assembled from user supplied oracle callables."""

    def __init__(
        self,
        feasible_sets: Sequence[FeasibleSet],
        constraint_dim: int,
        horizon: int,
        *,
        cost: Callable[[int, np.ndarray, int], float],
        gradient: Callable[[int, np.ndarray, int], np.ndarray],
        constraint: Callable[[int, np.ndarray, int], np.ndarray],
        constraint_jacobian: Callable[[int, np.ndarray, int], np.ndarray],
        affine_constraints: bool = False,
    ) -> None:
        """Initialize the game from oracle callables with the same signatures as the abstract methods."""
        super().__init__(feasible_sets, constraint_dim, horizon)
        self._cost = cost
        self._gradient = gradient
        self._constraint = constraint
        self._constraint_jacobian = constraint_jacobian
        self.affine_constraints = affine_constraints

    def cost(self, i: int, x: np.ndarray, t: int) -> float:
        """Evaluate J_{i,t} at the stacked profile x."""
        return float(self._cost(i, x, t))

    def gradient(self, i: int, x: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the partial gradient of J_{i,t} with respect to x_i."""
        return np.atleast_1d(np.asarray(self._gradient(i, x, t), dtype=float))

    def constraint(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the local constraint g_{i,t}(x_i)."""
        return np.atleast_1d(np.asarray(self._constraint(i, x_i, t), dtype=float))

    def constraint_jacobian(self, i: int, x_i: np.ndarray, t: int) -> np.ndarray:
        """Evaluate the Jacobian of g_{i,t} at x_i."""
        return np.atleast_2d(np.asarray(self._constraint_jacobian(i, x_i, t), dtype=float))


def _block_norms(values: np.ndarray, game: TimeVaryingGame) -> np.ndarray:
    """Return per-player Euclidean (Frobenius for matrices) norms of stacked columns."""
    starts = [sl.start for sl in game.slices]
    squares = values**2 if values.ndim == 1 else (values**2).sum(axis=0)
    return np.sqrt(np.add.reduceat(squares, starts))


def estimate_constants(
    game: TimeVaryingGame,
    samples: int = DEFAULT_CONSTANT_SAMPLES,
    *,
    seed: int = 0,
) -> GameConstants:
    """Estimate L, M, H and mu for a game.

    Closed-form constants are used when the game provides them; otherwise L, M and H
    are sampled maxima over the feasible sets inflated by a safety factor. mu is always
    the sampled minimum of the monotonicity ratio of the pseudo-gradient.

    Args:
        game: Game to analyse
        samples: Number of sampled (x, y, t) triples
        seed: Seed of the sampling generator

    Returns:
        The bound constants

    Raises:
        AssumptionViolation: If the sampled mu is not positive

    """
    if samples < 1:
        msg = f"samples must be positive, got {samples}"
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    rounds = rng.integers(1, game.horizon + 1, size=samples)
    first = game.product.sample(rng, samples)
    second = game.product.sample(rng, samples)

    mu_hat = np.inf
    h_hat = 0.0
    scale_hat = max(s.radius for s in game.feasible_sets)
    m_hat = 0.0
    closed = game.closed_form_constants()

    for x, y, t in zip(first, second, rounds, strict=True):
        t = int(t)
        fx = game.pseudo_gradient(x, t)
        fy = game.pseudo_gradient(y, t)
        diff = x - y
        gap = float(diff @ diff)
        if gap == 0.0:
            continue
        mu_hat = min(mu_hat, float((fx - fy) @ diff) / gap)
        h_hat = max(h_hat, float(np.max(_block_norms(fx - fy, game))) / np.sqrt(gap))

        if closed is None:
            scale_hat = max(
                scale_hat,
                float(np.max(np.abs(game.costs(x, t)))),
                float(np.max(np.linalg.norm(game.constraints(x, t), axis=1))),
            )
            m_hat = max(
                m_hat,
                float(np.max(_block_norms(fx, game))),
                float(np.max(_block_norms(game.aggregate_jacobian(x, t), game))),
            )

    if not mu_hat > 0.0:
        msg = f"Pseudo-gradient is not strongly monotone on the sampled pairs (mu_hat={mu_hat:.6g})"
        raise AssumptionViolation(msg)

    if closed is not None:
        constants = GameConstants(L=closed.L, M=closed.M, H=closed.H, mu=float(mu_hat))
    else:
        constants = GameConstants(
            L=SAMPLED_CONSTANT_INFLATION * scale_hat,
            M=SAMPLED_CONSTANT_INFLATION * m_hat,
            H=SAMPLED_CONSTANT_INFLATION * h_hat,
            mu=float(mu_hat),
        )

    _LOGGER.debug(
        "Game constants (%s): L=%.6g M=%.6g H=%.6g mu=%.6g",
        "closed form" if closed is not None else "sampled",
        *constants,
    )
    return constants


def gradient_check(
    game: TimeVaryingGame,
    rng: np.random.Generator,
    samples: int = 100,
    step: float = 1e-6,
) -> float:
    """Return the largest relative error between partial gradients and central differences of the costs."""
    worst = 0.0
    for _ in range(samples):
        x = game.product.sample(rng)
        t = int(rng.integers(1, game.horizon + 1))
        for i, sl in enumerate(game.slices):
            analytic = game.gradient(i, x, t)
            numeric = np.empty_like(analytic)
            for k, index in enumerate(range(sl.start, sl.stop)):
                plus, minus = x.copy(), x.copy()
                plus[index] += step
                minus[index] -= step
                numeric[k] = (game.cost(i, plus, t) - game.cost(i, minus, t)) / (2.0 * step)
            worst = max(worst, float(np.max(np.abs(numeric - analytic) / np.maximum(np.abs(analytic), 1.0))))
    return worst


def jacobian_check(
    game: TimeVaryingGame,
    rng: np.random.Generator,
    samples: int = 100,
    step: float = 1e-6,
) -> float:
    """Return the largest relative error between constraint Jacobians and central differences."""
    worst = 0.0
    for _ in range(samples):
        x = game.product.sample(rng)
        t = int(rng.integers(1, game.horizon + 1))
        for i, sl in enumerate(game.slices):
            x_i = x[sl]
            analytic = game.constraint_jacobian(i, x_i, t)
            numeric = np.empty_like(analytic)
            for k in range(x_i.size):
                plus, minus = x_i.copy(), x_i.copy()
                plus[k] += step
                minus[k] -= step
                numeric[:, k] = (game.constraint(i, plus, t) - game.constraint(i, minus, t)) / (2.0 * step)
            worst = max(worst, float(np.max(np.abs(numeric - analytic) / np.maximum(np.abs(analytic), 1.0))))
    return worst
