"""Dynamic regret, constraint violation, path length and runtime bound diagnostics."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import logging

import numpy as np

from .const import (
    BOUND_DUAL_CONSENSUS,
    BOUND_DUAL_NORM,
    BOUND_DUAL_PERTURBATION,
    BOUND_ESTIMATE_ERROR,
    BOUND_MIXED_DUAL_NORM,
    BOUND_PROBLEM_SCALE,
    BOUNDS,
    MARGIN_TOL,
)
from .engine import RoundSnapshot, RunTrace, StepSchedule
from .equilibrium import GneSolution, path_hops
from .exceptions import BoundViolated, DegenerateSeries, LengthMismatch
from .game import GameConstants, TimeVaryingGame
from .graph import GraphTopology

_LOGGER = logging.getLogger(__name__)

MIN_FIT_POINTS = 2

type GneSequence = Sequence[GneSolution] | Sequence[np.ndarray]


def _actions(item: GneSolution | np.ndarray) -> np.ndarray:
    return item.actions if isinstance(item, GneSolution) else np.asarray(item, dtype=float)


def _profiles(gne_sequence: GneSequence, horizon: int) -> np.ndarray:
    """Return the T x n matrix of comparator profiles for rounds 1..T."""
    if len(gne_sequence) not in (horizon, horizon + 1):
        msg = f"GNE sequence has {len(gne_sequence)} profiles for a trace of {horizon} rounds"
        raise LengthMismatch(msg)
    rows = [_actions(item) for item in gne_sequence[:horizon]]
    return np.asarray(rows, dtype=float).reshape(horizon, -1)


def regret_matrix(trace: RunTrace, gne_sequence: GneSequence, game: TimeVaryingGame) -> np.ndarray:
    """Return the T x N matrix of running regrets Reg_i(t).

    Round t contributes J_{i,t}(x_{i,t}, x*_{-i,t}) - J_{i,t}(x*_t) for every player i.
    """
    comparators = _profiles(gne_sequence, trace.horizon)
    increments = np.stack(
        [
            game.unilateral_costs(snapshot.actions, comparator, snapshot.t) - game.costs(comparator, snapshot.t)
            for snapshot, comparator in zip(trace.snapshots, comparators, strict=True)
        ]
    )
    return np.cumsum(increments, axis=0)


def tracking_error(trace: RunTrace, gne_sequence: GneSequence) -> np.ndarray:
    """Return ||x_t - x*_t||_inf for t = 1..T."""
    if not trace.snapshots:
        return np.zeros(0)
    comparators = _profiles(gne_sequence, trace.horizon)
    return np.max(np.abs(trace.actions() - comparators), axis=1)


def dynamic_regret(trace: RunTrace, gne_sequence: GneSequence, game: TimeVaryingGame, i: int) -> np.ndarray:
    """Return the running regret Reg_i(t), t = 1..T, of player i (0-based)."""
    return regret_matrix(trace, gne_sequence, game)[:, i]


def constraint_violation(trace: RunTrace, game: TimeVaryingGame) -> np.ndarray:
    """Return R_g(t) = ||[sum_{s<=t} g_s(x_s)]_+|| for every prefix t."""
    if not trace.snapshots:
        return np.zeros(0)
    values = np.stack([game.aggregate_constraint(s.actions, s.t) for s in trace.snapshots])
    return np.linalg.norm(np.maximum(np.cumsum(values, axis=0), 0.0), axis=1)


def path_length_series(gne_sequence: GneSequence, horizon: int) -> np.ndarray:
    """Return Phi*_t for t = 1..T, with x*_{T+1} := x*_T when only T profiles are given."""
    return np.cumsum(path_hops([_actions(item) for item in gne_sequence], horizon))


def fit_exponent(series: Sequence[float] | np.ndarray) -> float:
    """Fit the slope of log(series_t) against log(t) over the last half of t = 1..T.

    Raises:
        DegenerateSeries: If the window holds non-positive values or too few points

    """
    values = np.asarray(series, dtype=float)
    start = values.size // 2
    window = values[start:]
    rounds = np.arange(start + 1, values.size + 1, dtype=float)

    nonpositive = int(np.count_nonzero(~(window > 0.0)))
    if nonpositive:
        msg = f"Cannot fit a power law: {nonpositive} non-positive values in the fit window"
        raise DegenerateSeries(msg, n_nonpositive=nonpositive)
    if window.size < MIN_FIT_POINTS:
        msg = f"Cannot fit a power law through {window.size} point(s)"
        raise DegenerateSeries(msg, n_nonpositive=0)

    slope, _ = np.polyfit(np.log(rounds), np.log(window), 1)
    return float(slope)


@dataclass
class MarginTable:
    """Per-round, per-player margins (bound minus observed value) of each diagnostic bound."""

    rounds: list[int] = field(default_factory=list)
    margins: dict[str, list[np.ndarray]] = field(default_factory=lambda: {bound: [] for bound in BOUNDS})

    def append(self, t: int, row: dict[str, np.ndarray]) -> None:
        """Record the margins of round t."""
        self.rounds.append(t)
        for bound in BOUNDS:
            self.margins[bound].append(row[bound])

    def matrix(self, bound: str) -> np.ndarray:
        """Return the T x N margin matrix of one bound."""
        return np.stack(self.margins[bound]) if self.margins[bound] else np.zeros((0, 0))

    def minimum(self, bound: str | None = None) -> float:
        """Return the smallest margin of one bound, or of all bounds."""
        bounds = BOUNDS if bound is None else [bound]
        return min((float(np.min(self.matrix(name))) for name in bounds if self.margins[name]), default=np.inf)

    def round_minimum(self, index: int, bounds: Sequence[str]) -> float:
        """Return the smallest margin over the given bounds and all players in one recorded round."""
        return min(float(np.min(self.margins[bound][index])) for bound in bounds)

    def check(self, tol: float = MARGIN_TOL) -> None:
        """Raise for the first round, player and bound whose margin is below tol.

        Raises:
            BoundViolated: On the first violation in round order

        """
        for index, t in enumerate(self.rounds):
            for bound in BOUNDS:
                row = self.margins[bound][index]
                player = int(np.argmin(row))
                if row[player] < tol:
                    msg = f"Bound {bound} violated at round {t} by player {player + 1} (margin {row[player]:.6g})"
                    raise BoundViolated(msg, round_index=t, player=player + 1, bound=bound, margin=float(row[player]))


class DiagnosticMonitor:
    """Round observer that evaluates the estimate-error, dual and problem-scale bounds.

    The bound sums follow S_1 = alpha_0, S_{t+1} = sigma S_t + alpha_t for the estimate
    error and C_1 = gamma_0^2, C_{t+1} = sigma_m C_t + gamma_t^2 for dual consensus.
    In hard mode the first margin below tolerance raises BoundViolated; in soft mode
    violations are logged once per bound.
    """

    def __init__(
        self,
        game: TimeVaryingGame,
        constants: GameConstants,
        schedule: StepSchedule,
        graph: GraphTopology | None,
        *,
        hard: bool = False,
        l_scale: float = 1.0,
    ) -> None:
        """Initialize the monitor; l_scale multiplies the L used by every bound."""
        self.game = game
        self.schedule = schedule
        self.hard = hard
        self.scale = constants.L * l_scale
        self.coupling = 2.0 * self.scale * constants.M + 2.0 * self.scale
        self.sigma = graph.sigma if graph is not None else 0.0
        self.sigma_m = graph.sigma_m if graph is not None else 0.0
        self.table = MarginTable()
        self._starts = [sl.start for sl in game.slices]
        self._estimate_sum = schedule.alpha(0)
        self._consensus_sum = schedule.gamma(0) ** 2
        self._previous_t = 0
        self._warned: set[str] = set()

    def _block_norms(self, squares: np.ndarray) -> np.ndarray:
        return np.sqrt(np.add.reduceat(squares, self._starts, axis=-1))

    def __call__(self, snapshot: RoundSnapshot) -> None:
        """Evaluate every bound for one round."""
        t = snapshot.t
        if t != self._previous_t + 1:
            msg = f"Snapshots must arrive in round order: got {t} after {self._previous_t}"
            raise ValueError(msg)
        if t > 1:
            alpha, _, gamma = self.schedule.values(t - 1)
            self._estimate_sum = self.sigma * self._estimate_sum + alpha
            self._consensus_sum = self.sigma_m * self._consensus_sum + gamma**2
        self._previous_t = t

        n_players = self.game.n_players
        _, beta, gamma = self.schedule.values(t)
        dual_cap = self.scale * gamma / beta

        errors = self._block_norms(np.sum((snapshot.estimates - snapshot.actions) ** 2, axis=0))
        average = snapshot.multipliers.mean(axis=0)
        consensus = np.linalg.norm(snapshot.mixed_multipliers - average, axis=1)
        action_norms = self._block_norms(snapshot.actions**2)
        costs = np.abs(self.game.costs(snapshot.actions, t))
        constraint_norms = np.linalg.norm(self.game.constraints(snapshot.actions, t), axis=1)

        row = {
            BOUND_ESTIMATE_ERROR: 2.0 * np.sqrt(n_players - 1) * self.scale * self._estimate_sum - errors,
            BOUND_DUAL_NORM: dual_cap - np.linalg.norm(snapshot.multipliers, axis=1),
            BOUND_MIXED_DUAL_NORM: dual_cap - np.linalg.norm(snapshot.mixed_multipliers, axis=1),
            BOUND_DUAL_CONSENSUS: np.sqrt(n_players) * self.coupling * self._consensus_sum - consensus,
            BOUND_DUAL_PERTURBATION: self.coupling * gamma**2 - snapshot.perturbations,
            BOUND_PROBLEM_SCALE: self.scale - np.maximum(np.maximum(action_norms, costs), constraint_norms),
        }
        self.table.append(t, row)

        for bound, margins in row.items():
            player = int(np.argmin(margins))
            margin = float(margins[player])
            if margin >= MARGIN_TOL:
                continue
            if self.hard:
                msg = f"Bound {bound} violated at round {t} by player {player + 1} (margin {margin:.6g})"
                raise BoundViolated(msg, round_index=t, player=player + 1, bound=bound, margin=margin)
            if bound not in self._warned:
                self._warned.add(bound)
                _LOGGER.warning("Bound %s violated at round %d by player %d (margin %.6g)", bound, t, player + 1, margin)


def diagnostic_margins(
    trace: RunTrace,
    constants: GameConstants,
    schedule: StepSchedule,
    graph: GraphTopology | None,
    game: TimeVaryingGame,
    *,
    l_scale: float = 1.0,
) -> MarginTable:
    """Recompute the margin table of a finished run without raising."""
    monitor = DiagnosticMonitor(game, constants, schedule, graph, l_scale=l_scale)
    for snapshot in trace.snapshots:
        monitor(snapshot)
    return monitor.table


class StreamingMetrics:
    """Round observer accumulating regret, violation and path length as the run progresses."""

    def __init__(self, game: TimeVaryingGame, gne_sequence: GneSequence) -> None:
        """Initialize with the comparator sequence for rounds 1..T."""
        self.game = game
        self._comparators = _profiles(gne_sequence, game.horizon)
        self._hops = path_hops([_actions(item) for item in gne_sequence], game.horizon)
        self._regret = np.zeros(game.n_players)
        self._accumulated = np.zeros(game.constraint_dim)
        self._path = 0.0
        self.regret_max: list[float] = []
        self.violation: list[float] = []
        self.path_length: list[float] = []

    def __call__(self, snapshot: RoundSnapshot) -> None:
        """Fold one round into the running metrics."""
        t = snapshot.t
        comparator = self._comparators[t - 1]
        self._regret += self.game.unilateral_costs(snapshot.actions, comparator, t) - self.game.costs(comparator, t)
        self._accumulated += self.game.aggregate_constraint(snapshot.actions, t)
        self._path += float(self._hops[t - 1])
        self.regret_max.append(float(np.max(self._regret)))
        self.violation.append(float(np.linalg.norm(np.maximum(self._accumulated, 0.0))))
        self.path_length.append(self._path)

    @property
    def regrets(self) -> np.ndarray:
        """Current Reg_i(t) of every player."""
        return self._regret.copy()


@dataclass
class MetricsReport:
    """Final performance measures of a run.

    Attributes:
        regrets: T x N running regrets
        violation: Running R_g(t)
        path_length: Running Phi*_t
        tracking_error: Distance ||x_t - x*_t||_inf of the played profile to the comparator per round
        regret_exponent: Fitted slope of max_i Reg_i(t), or None when degenerate
        violation_exponent: Fitted slope of R_g(t), or None when degenerate
        degenerate: Number of non-positive values per failed fit, by series name
        margins: Diagnostic margins when diagnostics ran

    """

    regrets: np.ndarray
    violation: np.ndarray
    path_length: np.ndarray
    tracking_error: np.ndarray = field(default_factory=lambda: np.zeros(0))
    regret_exponent: float | None = None
    violation_exponent: float | None = None
    degenerate: dict[str, int] = field(default_factory=dict)
    margins: MarginTable | None = None

    @property
    def horizon(self) -> int:
        """Number of rounds covered."""
        return int(self.violation.size)

    @property
    def regret_max(self) -> np.ndarray:
        """Running max_i Reg_i(t)."""
        return self.regrets.max(axis=1)

    def average_regret(self, t: int) -> float:
        """Return max_i Reg_i(t) / t."""
        return float(self.regret_max[t - 1]) / t

    def average_violation(self, t: int) -> float:
        """Return R_g(t) / t."""
        return float(self.violation[t - 1]) / t

    def tracking_by_segment(self, segments: int) -> np.ndarray:
        """Return the mean tracking error over consecutive, nearly equal segments of the run."""
        return np.array([chunk.mean() for chunk in np.array_split(self.tracking_error, segments) if chunk.size])


def build_report(
    trace: RunTrace,
    gne_sequence: GneSequence,
    game: TimeVaryingGame,
    *,
    margins: MarginTable | None = None,
) -> MetricsReport:
    """Recompute every metric from a finished trace and fit the growth exponents."""
    report = MetricsReport(
        regrets=regret_matrix(trace, gne_sequence, game),
        violation=constraint_violation(trace, game),
        path_length=path_length_series(gne_sequence, trace.horizon),
        tracking_error=tracking_error(trace, gne_sequence),
        margins=margins,
    )
    for name, series in (("regret", report.regret_max), ("violation", report.violation)):
        try:
            exponent = fit_exponent(series)
        except DegenerateSeries as ex:
            report.degenerate[name] = ex.n_nonpositive
            _LOGGER.warning("No %s exponent: %s", name, ex)
            continue
        setattr(report, f"{name}_exponent", exponent)
    return report
