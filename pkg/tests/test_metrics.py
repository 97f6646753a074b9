"""Test regret, violation, path length and the bound diagnostics."""

import logging

import numpy as np
import pytest

from gneseek.const import BOUND_PROBLEM_SCALE, BOUNDS, DUAL_BOUNDS
from gneseek.engine import RoundSnapshot, RunTrace, StepSchedule, run
from gneseek.equilibrium import GneSolution, path_length, solve_vgne_sequence
from gneseek.exceptions import BoundViolated, DegenerateSeries, LengthMismatch
from gneseek.game import CournotGame, OracleGame, estimate_constants
from gneseek.geometry import FeasibleSet, make_geometries
from gneseek.graph import GraphTopology
from gneseek.metrics import (
    DiagnosticMonitor,
    MarginTable,
    StreamingMetrics,
    build_report,
    constraint_violation,
    diagnostic_margins,
    dynamic_regret,
    fit_exponent,
    path_length_series,
    regret_matrix,
    tracking_error,
)


@pytest.fixture
def cournot_trace(cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule) -> RunTrace:
    """Distributed run on the small Cournot market."""
    return run(cournot, ring, make_geometries("euclidean", cournot.feasible_sets), schedule, seed=2)


@pytest.fixture
def cournot_solutions(cournot: CournotGame) -> list[GneSolution]:
    """Variational GNE of every round of the small Cournot market."""
    return solve_vgne_sequence(cournot)


def test_regret_vanishes_against_the_played_actions(cournot: CournotGame, cournot_trace: RunTrace) -> None:
    """Comparing the trace with itself gives zero regret."""
    regrets = regret_matrix(cournot_trace, list(cournot_trace.actions()), cournot)

    assert regrets.shape == (cournot.horizon, cournot.n_players)
    np.testing.assert_allclose(regrets, 0.0, atol=1e-9)


def test_regret_matches_direct_sum(
    cournot: CournotGame, cournot_trace: RunTrace, cournot_solutions: list[GneSolution]
) -> None:
    """The running regret of a player is the sum of its unilateral cost gaps."""
    i = 2
    expected = 0.0
    for snapshot, solution in zip(cournot_trace.snapshots, cournot_solutions, strict=True):
        deviated = solution.actions.copy()
        deviated[i] = snapshot.actions[i]
        expected += cournot.cost(i, deviated, snapshot.t) - cournot.cost(i, solution.actions, snapshot.t)

    regret = dynamic_regret(cournot_trace, cournot_solutions, cournot, i)

    assert regret[-1] == pytest.approx(expected, rel=1e-9, abs=1e-9)


def test_violation_matches_direct_sum(cournot: CournotGame, cournot_trace: RunTrace) -> None:
    """R_g(t) is the positive part of the accumulated aggregate constraint."""
    violation = constraint_violation(cournot_trace, cournot)

    accumulated = np.zeros(cournot.constraint_dim)
    for snapshot, value in zip(cournot_trace.snapshots, violation, strict=True):
        accumulated += cournot.aggregate_constraint(snapshot.actions, snapshot.t)
        assert value == pytest.approx(float(np.linalg.norm(np.maximum(accumulated, 0.0))), abs=1e-12)


def test_violation_of_empty_trace(cournot: CournotGame) -> None:
    """No rounds means no violation entries."""
    assert constraint_violation(RunTrace(), cournot).size == 0


def _scripted_constraint(values: list[list[float]]) -> tuple[OracleGame, RunTrace]:
    """One player whose constraint takes the listed value in each round, with a trace of that length."""
    dim = len(values[0])
    game = OracleGame(
        [FeasibleSet.box(0.0, 1.0)],
        constraint_dim=dim,
        horizon=len(values),
        cost=lambda i, x, t: 0.0,  # noqa: ARG005
        gradient=lambda i, x, t: np.zeros(1),  # noqa: ARG005
        constraint=lambda i, x_i, t: np.array(values[t - 1]),  # noqa: ARG005
        constraint_jacobian=lambda i, x_i, t: np.zeros((dim, 1)),  # noqa: ARG005
    )
    trace = RunTrace(
        snapshots=[
            RoundSnapshot(
                t=t,
                alpha=1.0,
                beta=1.0,
                gamma=1.0,
                actions=np.zeros(1),
                estimates=np.zeros((1, 1)),
                multipliers=np.zeros((1, dim)),
                mixed_multipliers=np.zeros((1, dim)),
                perturbations=np.zeros(1),
            )
            for t in range(1, len(values) + 1)
        ]
    )
    return game, trace


@pytest.mark.parametrize(
    ("values", "expected"),
    [
        pytest.param([[2.0], [-1.0], [-3.0]], [2.0, 1.0, 0.0], id="clamped running sum"),
        pytest.param([[1.0, -1.0], [1.0, -1.0]], [1.0, 2.0], id="coordinatewise clamp then norm"),
        pytest.param([[-1.0], [-1.0]], [0.0, 0.0], id="slack rounds"),
    ],
)
def test_violation_examples(values: list[list[float]], expected: list[float]) -> None:
    """R_g(t) clamps the accumulated constraint before taking its norm."""
    game, trace = _scripted_constraint(values)

    np.testing.assert_allclose(constraint_violation(trace, game), expected)


def test_tracking_error_against_own_actions(cournot_trace: RunTrace) -> None:
    """The played profile is at distance zero from itself."""
    np.testing.assert_array_equal(tracking_error(cournot_trace, list(cournot_trace.actions())), 0.0)


def test_tracking_error_uses_max_coordinate(cournot: CournotGame, cournot_trace: RunTrace) -> None:
    """Each round reports the largest coordinate gap to the comparator."""
    comparators = [actions + np.arange(cournot.n_players) for actions in cournot_trace.actions()]

    np.testing.assert_allclose(tracking_error(cournot_trace, comparators), cournot.n_players - 1.0)


def test_report_tracking_segments(
    cournot: CournotGame, cournot_trace: RunTrace, cournot_solutions: list[GneSolution]
) -> None:
    """Segment means cover the whole run."""
    report = build_report(cournot_trace, cournot_solutions, cournot)
    segments = report.tracking_by_segment(4)

    assert report.tracking_error.shape == (cournot.horizon,)
    assert segments.size == 4
    assert np.all(segments >= 0.0)
    assert segments.mean() == pytest.approx(report.tracking_error.mean())


def test_path_length_series_ends_at_path_length(cournot_solutions: list[GneSolution]) -> None:
    """The running path length ends at Phi*_T."""
    series = path_length_series(cournot_solutions, len(cournot_solutions))
    profiles = [solution.actions for solution in cournot_solutions]

    assert series[-1] == pytest.approx(path_length(profiles, len(profiles)))
    assert np.all(np.diff(series) >= 0.0)


def test_comparator_length_must_match(cournot: CournotGame, cournot_trace: RunTrace) -> None:
    """A comparator sequence of the wrong length is rejected."""
    with pytest.raises(LengthMismatch):
        regret_matrix(cournot_trace, list(cournot_trace.actions())[:5], cournot)


@pytest.mark.parametrize(
    "exponent",
    [
        pytest.param(0.5, id="square root"),
        pytest.param(0.875, id="seven eighths"),
        pytest.param(1.0, id="linear"),
    ],
)
def test_fit_exponent_recovers_power_laws(exponent: float) -> None:
    """Pure power laws give their exponent back."""
    rounds = np.arange(1, 401, dtype=float)

    assert fit_exponent(3.0 * rounds**exponent) == pytest.approx(exponent, abs=1e-9)


def test_fit_exponent_counts_non_positive_values() -> None:
    """Zeros in the fit window make the series degenerate."""
    series = np.ones(20)
    series[15:] = 0.0

    with pytest.raises(DegenerateSeries) as excinfo:
        fit_exponent(series)

    assert excinfo.value.n_nonpositive == 5


def test_fit_exponent_needs_two_points() -> None:
    """A single round cannot be fitted."""
    with pytest.raises(DegenerateSeries):
        fit_exponent([1.0])


def test_margin_table() -> None:
    """The table reports minima per bound, per round and overall."""
    table = MarginTable()
    table.append(1, {bound: np.array([2.0, 3.0]) for bound in BOUNDS})
    table.append(2, {bound: np.array([1.0, -0.5 if bound == BOUND_PROBLEM_SCALE else 4.0]) for bound in BOUNDS})

    assert table.matrix(BOUND_PROBLEM_SCALE).shape == (2, 2)
    assert table.minimum() == -0.5
    assert table.minimum(DUAL_BOUNDS[0]) == 1.0
    assert table.round_minimum(0, DUAL_BOUNDS) == 2.0
    assert table.round_minimum(1, [BOUND_PROBLEM_SCALE]) == -0.5

    with pytest.raises(BoundViolated) as excinfo:
        table.check()

    assert excinfo.value.round_index == 2
    assert excinfo.value.player == 2
    assert excinfo.value.bound == BOUND_PROBLEM_SCALE


def test_empty_margin_table() -> None:
    """An empty table has an infinite minimum and passes its check."""
    table = MarginTable()

    assert table.minimum() == np.inf
    table.check()


def test_bounds_hold_on_cournot(
    cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule
) -> None:
    """With the true constants every margin stays non-negative."""
    constants = estimate_constants(cournot)
    monitor = DiagnosticMonitor(cournot, constants, schedule, ring, hard=True)

    run(cournot, ring, make_geometries("euclidean", cournot.feasible_sets), schedule, observers=[monitor])

    assert monitor.table.rounds == list(range(1, cournot.horizon + 1))
    assert monitor.table.minimum() >= 0.0


def test_soft_monitor_logs_violations(
    cournot: CournotGame,
    ring: GraphTopology,
    schedule: StepSchedule,
    caplog: pytest.LogCaptureFixture,
) -> None:
    """A shrunken L is reported in soft mode without stopping the run."""
    constants = estimate_constants(cournot)
    monitor = DiagnosticMonitor(cournot, constants, schedule, ring, l_scale=1e-3)

    with caplog.at_level(logging.WARNING):
        run(cournot, ring, make_geometries("euclidean", cournot.feasible_sets), schedule, observers=[monitor])

    assert monitor.table.minimum(BOUND_PROBLEM_SCALE) < 0.0
    assert len(monitor.table.rounds) == cournot.horizon
    assert "Bound problem_scale violated" in caplog.text


def test_hard_monitor_stops_the_run(cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule) -> None:
    """A shrunken L raises on the first violating round."""
    constants = estimate_constants(cournot)
    monitor = DiagnosticMonitor(cournot, constants, schedule, ring, hard=True, l_scale=1e-3)

    with pytest.raises(BoundViolated) as excinfo:
        run(cournot, ring, make_geometries("euclidean", cournot.feasible_sets), schedule, observers=[monitor])

    assert excinfo.value.round_index == 1
    assert excinfo.value.exit_code == 5


def test_monitor_requires_round_order(
    cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule, cournot_trace: RunTrace
) -> None:
    """Skipping a round is an error."""
    monitor = DiagnosticMonitor(cournot, estimate_constants(cournot), schedule, ring)

    with pytest.raises(ValueError, match="round order"):
        monitor(cournot_trace.snapshots[1])


def test_recomputed_margins_match_the_live_monitor(
    cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule
) -> None:
    """Margins recomputed after the run equal those seen during it."""
    constants = estimate_constants(cournot)
    monitor = DiagnosticMonitor(cournot, constants, schedule, ring)
    trace = run(cournot, ring, make_geometries("euclidean", cournot.feasible_sets), schedule, observers=[monitor])

    table = diagnostic_margins(trace, constants, schedule, ring, cournot)

    for bound in BOUNDS:
        np.testing.assert_array_equal(table.matrix(bound), monitor.table.matrix(bound))


def test_streaming_metrics_match_report(
    cournot: CournotGame, ring: GraphTopology, schedule: StepSchedule, cournot_solutions: list[GneSolution]
) -> None:
    """Metrics folded round by round equal the post-hoc report."""
    streaming = StreamingMetrics(cournot, cournot_solutions)
    trace = run(
        cournot,
        ring,
        make_geometries("euclidean", cournot.feasible_sets),
        schedule,
        seed=2,
        observers=[streaming],
    )

    report = build_report(trace, cournot_solutions, cournot)

    np.testing.assert_allclose(streaming.regret_max, report.regret_max, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(streaming.violation, report.violation, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(streaming.path_length, report.path_length, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(streaming.regrets, report.regrets[-1], rtol=1e-12, atol=1e-9)


def test_report_marks_degenerate_series(ring: GraphTopology) -> None:
    """Zero costs and a slack cap leave both exponents unfitted."""
    horizon = 12
    game = OracleGame(
        [FeasibleSet.box(0.0, 1.0)] * 4,
        constraint_dim=1,
        horizon=horizon,
        cost=lambda i, x, t: 0.0,  # noqa: ARG005
        gradient=lambda i, x, t: np.zeros(1),  # noqa: ARG005
        constraint=lambda i, x_i, t: x_i - 10.0,  # noqa: ARG005
        constraint_jacobian=lambda i, x_i, t: np.ones((1, 1)),  # noqa: ARG005
    )
    trace = run(game, ring, make_geometries("euclidean", game.feasible_sets), StepSchedule(0.2, 0.8, horizon))

    report = build_report(trace, [np.zeros(4)] * horizon, game)

    assert report.horizon == horizon
    assert report.regret_exponent is None
    assert report.violation_exponent is None
    assert report.degenerate == {"regret": horizon // 2, "violation": horizon // 2}
    assert report.average_violation(horizon) == 0.0
