"""Synchronous round loop of the distributed online primal-dual mirror descent."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
import logging
import time

import numpy as np

from .const import A1_RANGE, A2_RANGE, CONF_A1, CONF_A2, CONF_SCHEDULE
from .exceptions import AssumptionViolation, GneSeekError, NonFiniteState, ValidationError
from .game import TimeVaryingGame
from .geometry import BregmanGeometry, FeasibleSet, mirror_step
from .graph import GraphTopology

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes alpha_t = t^-a1, beta_t = (T+1)^-a2 and gamma_t = (T+1)^-(1-a2).

    All three equal 1 at t = 0; those values only enter the diagnostic bound sums.
    """

    a1: float
    a2: float
    horizon: int

    def __post_init__(self) -> None:
        """Validate the exponent ranges and the horizon."""
        for key, number, (low, high) in ((CONF_A1, self.a1, A1_RANGE), (CONF_A2, self.a2, A2_RANGE)):
            if not low < number < high:
                msg = f"{CONF_SCHEDULE}.{key} = {number} must lie strictly inside ({low:.6g}, {high:.6g})"
                raise ValidationError(msg, key=f"{CONF_SCHEDULE}.{key}")
        if self.horizon < 1:
            msg = f"Horizon must be at least 1, got {self.horizon}"
            raise ValidationError(msg)

    @classmethod
    def optimal(cls, horizon: int) -> StepSchedule:
        """Return the exponents a1 = 1/3, a2 = 3/4 that balance the regret and violation orders."""
        return cls(a1=1.0 / 3.0, a2=3.0 / 4.0, horizon=horizon)

    def alpha(self, t: int) -> float:
        """Primal step alpha_t."""
        return 1.0 if t == 0 else float(t) ** -self.a1

    def beta(self, t: int) -> float:
        """Dual regularization beta_t."""
        return 1.0 if t == 0 else float(self.horizon + 1) ** -self.a2

    def gamma(self, t: int) -> float:
        """Dual step gamma_t."""
        return 1.0 if t == 0 else float(self.horizon + 1) ** -(1.0 - self.a2)

    def values(self, t: int) -> tuple[float, float, float]:
        """Return (alpha_t, beta_t, gamma_t)."""
        return self.alpha(t), self.beta(t), self.gamma(t)

    @property
    def regret_exponent(self) -> float:
        """Predicted regret order, excluding the path-length term."""
        return max(0.5 + self.a1, 0.5 + self.a2 / 2.0, 1.0 - self.a1 / 2.0)

    @property
    def violation_exponent(self) -> float:
        """Predicted constraint violation order, excluding the path-length term."""
        return max(1.0 - self.a1 / 2.0, 2.0 - 1.5 * self.a2)

    def check_invariants(self) -> None:
        """Check the schedule conditions for every t in [1, T].

        Raises:
            AssumptionViolation: Naming the first round where a condition fails

        """
        previous_alpha, _, previous_gamma = self.values(0)
        previous_ratio = previous_gamma / self.beta(0)
        for t in range(1, self.horizon + 1):
            alpha, beta, gamma = self.values(t)
            failure = None
            if not 0.0 < gamma < 1.0:
                failure = f"gamma_t = {gamma} is not inside (0, 1)"
            elif not 0.0 < alpha <= min(previous_alpha, 1.0):
                failure = f"alpha_t = {alpha} is not non-increasing inside (0, 1]"
            elif gamma / beta < previous_ratio:
                failure = "gamma_t / beta_t decreases"
            elif t >= 2 and 1.0 / gamma - 1.0 / previous_gamma - beta > 0.0:  # noqa: PLR2004 condition starts at t = 2
                failure = "1/gamma_t - 1/gamma_(t-1) - beta_t is positive"
            if failure is not None:
                msg = f"Step schedule condition fails at t={t}: {failure}"
                raise AssumptionViolation(msg)
            previous_alpha, previous_gamma, previous_ratio = alpha, gamma, gamma / beta


@dataclass
class PlayerState:
    """Local variables of one player.

    Attributes:
        index: 0-based player index
        block: Slice of the player's own action in stacked vectors
        own_action: x_{i,t}
        estimates: Stacked estimates x_{ih,t}; the own block is never read
        multiplier: lambda_{i,t}
        mixed_multiplier: lambda~_{i,t}, set when the round's duals are mixed
        candidate: x~_{i,t+1}, set by the primal step
        dual_target: b_{i,t+1}, set by the dual step

    """

    index: int
    block: slice
    own_action: np.ndarray
    estimates: np.ndarray
    multiplier: np.ndarray
    mixed_multiplier: np.ndarray | None = None
    candidate: np.ndarray | None = None
    dual_target: np.ndarray | None = None

    def profile(self) -> np.ndarray:
        """Return the estimate vector with the own action in slot i."""
        profile = self.estimates.copy()
        profile[self.block] = self.own_action
        return profile


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    values.flags.writeable = False
    return values


@dataclass(frozen=True)
class RoundSnapshot:
    """Round-t state of every player, immutable once the round completes.

    Attributes:
        t: Round index
        alpha: alpha_t
        beta: beta_t
        gamma: gamma_t
        actions: Stacked actions x_t
        estimates: N x n matrix whose row i is the estimate vector of player i with its own action inserted
        multipliers: N x m matrix of lambda_{i,t}
        mixed_multipliers: N x m matrix of lambda~_{i,t}
        perturbations: ||lambda_{i,t+1} - lambda~_{i,t}|| per player

    """

    t: int
    alpha: float
    beta: float
    gamma: float
    actions: np.ndarray
    estimates: np.ndarray
    multipliers: np.ndarray
    mixed_multipliers: np.ndarray
    perturbations: np.ndarray


@dataclass
class RunTrace:
    """Snapshots of rounds 1..T plus the state produced by the last round."""

    snapshots: list[RoundSnapshot] = field(default_factory=list)
    final_actions: np.ndarray | None = None
    final_multipliers: np.ndarray | None = None
    duration: float = 0.0

    @property
    def horizon(self) -> int:
        """Number of recorded rounds."""
        return len(self.snapshots)

    def actions(self) -> np.ndarray:
        """Return the T x n matrix of played actions."""
        return np.stack([s.actions for s in self.snapshots])


type RoundObserver = Callable[[RoundSnapshot], None]


def _mixing_graph(game: TimeVaryingGame, graph: GraphTopology | None) -> GraphTopology:
    if graph is None:
        if game.n_players != 1:
            msg = f"A communication graph is required for {game.n_players} players"
            raise ValidationError(msg)
        return GraphTopology(weights=np.ones((1, 1)), sigma=0.0, sigma_m=0.0)
    if graph.n_players != game.n_players:
        msg = f"Graph has {graph.n_players} players but the game has {game.n_players}"
        raise ValidationError(msg)
    return graph


def _per_player(geometry: BregmanGeometry | Sequence[BregmanGeometry], n_players: int) -> list[BregmanGeometry]:
    if isinstance(geometry, BregmanGeometry):
        return [geometry] * n_players
    geometries = list(geometry)
    if len(geometries) != n_players:
        msg = f"Expected {n_players} geometries, got {len(geometries)}"
        raise ValidationError(msg)
    return geometries


def _sample_initial_actions(game: TimeVaryingGame, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [feasible_set.sample(rng) for feasible_set in game.feasible_sets]


def initialize(game: TimeVaryingGame, graph: GraphTopology | None, seed: int = 0) -> list[PlayerState]:
    """Draw x_{i,1} uniformly from Omega_i and zero every estimate and multiplier."""
    _mixing_graph(game, graph)
    return [
        PlayerState(
            index=i,
            block=sl,
            own_action=action,
            estimates=np.zeros(game.dimension),
            multiplier=np.zeros(game.constraint_dim),
        )
        for i, (sl, action) in enumerate(zip(game.slices, _sample_initial_actions(game, seed), strict=True))
    ]


def mix_multipliers(states: Sequence[PlayerState], graph: GraphTopology) -> np.ndarray:
    """Set lambda~_{i,t} = sum_j a_ij lambda_{j,t} on every state and return them as a matrix."""
    mixed = graph.mix(np.stack([state.multiplier for state in states]))
    for state, row in zip(states, mixed, strict=True):
        state.mixed_multiplier = row
    return mixed


def consensus_estimates(states: Sequence[PlayerState], graph: GraphTopology) -> np.ndarray:
    """Average every player's round-t estimates with its neighbors'.

    Row i of the result is sum_k a_ik x_{k.,t}, where player k contributes its own action
    in its own slot. The own block of each row keeps the previous estimate.
    """
    profiles = np.stack([state.profile() for state in states])
    averaged = graph.mix(profiles)
    for state, row in zip(states, averaged, strict=True):
        row[state.block] = state.estimates[state.block]
    return averaged


def _check_finite(values: np.ndarray, what: str, state: PlayerState) -> None:
    if not np.all(np.isfinite(values)):
        msg = f"Non-finite {what} for player {state.index + 1}: {values}"
        raise NonFiniteState(msg)


def primal_step(
    state: PlayerState,
    game: TimeVaryingGame,
    geometry: BregmanGeometry,
    feasible_set: FeasibleSet,
    schedule: StepSchedule,
    t: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Compute x~_{i,t+1} by the mirror step and x_{i,t+1} by the convex combination.

    The mixed multiplier must already be set on the state.
    """
    alpha, _, gamma = schedule.values(t)
    direction = game.gradient(state.index, state.profile(), t)
    direction = direction + gamma * game.constraint_jacobian(state.index, state.own_action, t).T @ state.mixed_multiplier
    _check_finite(direction, "primal direction", state)

    candidate = mirror_step(geometry, feasible_set, state.own_action, direction, alpha)
    next_action = feasible_set.clamp((1.0 - alpha) * state.own_action + alpha * candidate)
    _check_finite(next_action, "action", state)
    state.candidate = candidate
    return candidate, next_action


def dual_step(state: PlayerState, game: TimeVaryingGame, schedule: StepSchedule, t: int) -> np.ndarray:
    """Compute lambda_{i,t+1} = [lambda~ + gamma_t (gamma_t b_{i,t+1} - beta_t lambda~)]_+."""
    _, beta, gamma = schedule.values(t)
    jacobian = game.constraint_jacobian(state.index, state.own_action, t)
    target = jacobian @ (state.candidate - state.own_action) + game.constraint(state.index, state.own_action, t)
    state.dual_target = target

    mixed = state.mixed_multiplier
    multiplier = np.maximum(mixed + gamma * (gamma * target - beta * mixed), 0.0)
    _check_finite(multiplier, "multiplier", state)
    return multiplier


def run(
    game: TimeVaryingGame,
    graph: GraphTopology | None,
    geometry: BregmanGeometry | Sequence[BregmanGeometry],
    schedule: StepSchedule,
    *,
    seed: int = 0,
    observers: Sequence[RoundObserver] = (),
) -> RunTrace:
    """Execute T synchronous rounds.

    Each round every player mixes the duals, takes the primal and dual steps from the
    round-t state, and averages estimates of round-t actions; the new state is
    committed only after all players have finished. Observers receive every snapshot
    in round order.

    Raises:
        GneSeekError: Any step failure, annotated with the failing round

    """
    mixing = _mixing_graph(game, graph)
    geometries = _per_player(geometry, game.n_players)
    if schedule.horizon != game.horizon:
        msg = f"Schedule horizon {schedule.horizon} differs from the game horizon {game.horizon}"
        raise ValidationError(msg)

    states = initialize(game, graph, seed)
    trace = RunTrace()
    start_time = time.perf_counter()

    for t in range(1, game.horizon + 1):
        try:
            mixed = mix_multipliers(states, mixing)
            next_actions = []
            next_multipliers = []
            for state, state_geometry, feasible_set in zip(states, geometries, game.feasible_sets, strict=True):
                _, next_action = primal_step(state, game, state_geometry, feasible_set, schedule, t)
                next_actions.append(next_action)
                next_multipliers.append(dual_step(state, game, schedule, t))
            next_estimates = consensus_estimates(states, mixing)
        except GneSeekError as ex:
            ex.add_note(f"while running round {t} of {game.horizon}")
            ex.round_index = t
            raise

        alpha, beta, gamma = schedule.values(t)
        multipliers = np.stack(next_multipliers)
        snapshot = RoundSnapshot(
            t=t,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            actions=_frozen(np.concatenate([state.own_action for state in states])),
            estimates=_frozen(np.stack([state.profile() for state in states])),
            multipliers=_frozen(np.stack([state.multiplier for state in states])),
            mixed_multipliers=_frozen(mixed),
            perturbations=_frozen(np.linalg.norm(multipliers - mixed, axis=1)),
        )

        for state, action, multiplier, estimates in zip(states, next_actions, multipliers, next_estimates, strict=True):
            state.own_action = action
            state.multiplier = multiplier
            state.estimates = estimates

        trace.snapshots.append(snapshot)
        for observer in observers:
            observer(snapshot)

    trace.final_actions = _frozen(np.concatenate([state.own_action for state in states]))
    trace.final_multipliers = _frozen(np.stack([state.multiplier for state in states]))
    trace.duration = time.perf_counter() - start_time
    _LOGGER.info("Ran %d rounds with %d players in %.2f s", game.horizon, game.n_players, trace.duration)
    return trace


def run_full_information(
    game: TimeVaryingGame,
    schedule: StepSchedule,
    *,
    geometry: BregmanGeometry | Sequence[BregmanGeometry],
    seed: int = 0,
    averaged: bool = False,
    observers: Sequence[RoundObserver] = (),
) -> RunTrace:
    """Centralized baseline where every player sees x_t, the shared lambda_t and g_t.

    The default follows the full-information update directly: x_{i,t+1} is the mirror
    step itself and lambda_{t+1} = [lambda_t + gamma_t (gamma_t g_t(x_t) - beta_t lambda_t)]_+.
    With averaged=True the actions are mixed as (1 - alpha_t) x + alpha_t x~ and the dual
    step uses the linearized constraint, which coincides with the distributed loop for
    a single player.
    """
    geometries = _per_player(geometry, game.n_players)
    actions = np.concatenate(_sample_initial_actions(game, seed))
    multiplier = np.zeros(game.constraint_dim)
    trace = RunTrace()
    start_time = time.perf_counter()

    for t in range(1, game.horizon + 1):
        alpha, beta, gamma = schedule.values(t)
        next_actions = np.empty_like(actions)
        target = np.zeros(game.constraint_dim)
        try:
            for i, (sl, state_geometry, feasible_set) in enumerate(
                zip(game.slices, geometries, game.feasible_sets, strict=True)
            ):
                own = actions[sl]
                jacobian = game.constraint_jacobian(i, own, t)
                direction = game.gradient(i, actions, t) + gamma * jacobian.T @ multiplier
                candidate = mirror_step(state_geometry, feasible_set, own, direction, alpha)
                if averaged:
                    next_actions[sl] = feasible_set.clamp((1.0 - alpha) * own + alpha * candidate)
                    target += jacobian @ (candidate - own) + game.constraint(i, own, t)
                else:
                    next_actions[sl] = candidate
                    target += game.constraint(i, own, t)
            next_multiplier = np.maximum(multiplier + gamma * (gamma * target - beta * multiplier), 0.0)
            if not (np.all(np.isfinite(next_actions)) and np.all(np.isfinite(next_multiplier))):
                msg = "Non-finite state in the full-information baseline"
                raise NonFiniteState(msg)
        except GneSeekError as ex:
            ex.add_note(f"while running round {t} of {game.horizon}")
            ex.round_index = t
            raise

        shared = np.tile(multiplier, (game.n_players, 1))
        snapshot = RoundSnapshot(
            t=t,
            alpha=alpha,
            beta=beta,
            gamma=gamma,
            actions=_frozen(actions),
            estimates=_frozen(np.tile(actions, (game.n_players, 1))),
            multipliers=_frozen(shared),
            mixed_multipliers=_frozen(shared),
            perturbations=_frozen(np.full(game.n_players, float(np.linalg.norm(next_multiplier - multiplier)))),
        )
        trace.snapshots.append(snapshot)
        for observer in observers:
            observer(snapshot)
        actions, multiplier = next_actions, next_multiplier

    trace.final_actions = _frozen(actions)
    trace.final_multipliers = _frozen(np.tile(multiplier, (game.n_players, 1)))
    trace.duration = time.perf_counter() - start_time
    _LOGGER.info("Ran %d full-information rounds in %.2f s", game.horizon, trace.duration)
    return trace
