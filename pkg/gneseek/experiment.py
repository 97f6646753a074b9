"""Run a configured experiment and write its trace and summary."""

from __future__ import annotations

from dataclasses import dataclass
import logging
from pathlib import Path
import time

import numpy as np
import pandas as pd

from .const import (
    BOUND_ESTIMATE_ERROR,
    BOUNDS,
    CONFIG_COPY_FILE,
    DUAL_BOUNDS,
    EXIT_ERROR,
    EXIT_OK,
    FLOAT_FORMAT,
    GAME_KIND_COURNOT,
    STATUS_FAILED,
    STATUS_PENDING,
    STATUS_SUCCESS,
    SUMMARY_FILE,
    TRACE_FILE,
)
from .engine import RunTrace, StepSchedule, run
from .equilibrium import GneSolution, closed_form_discrepancy, dual_bound, solve_vgne_sequence
from .exceptions import GneSeekError
from .game import GameConstants, TimeVaryingGame, estimate_constants
from .graph import GraphTopology
from .loader import build_game, build_geometries, build_graph, build_schedule
from .metrics import DiagnosticMonitor, MetricsReport, build_report
from .types import RunConfig

_LOGGER = logging.getLogger(__name__)

# Closed-form Cournot equilibria and solver output may differ by the solver tolerance
DISCREPANCY_WARNING = 1e-6
# Averages are compared at T and at T / EARLY_FRACTION
EARLY_FRACTION = 8
# Time-averaged regret is expected to at least halve between the two
REGRET_DECAY = 0.5
TRACKING_SEGMENTS = 4


@dataclass
class ExperimentResult:
    """Everything produced by one experiment."""

    config: RunConfig
    game: TimeVaryingGame
    graph: GraphTopology
    schedule: StepSchedule
    constants: GameConstants
    solutions: list[GneSolution]
    trace: RunTrace
    report: MetricsReport


def execute(config: RunConfig) -> ExperimentResult:
    """Build the configured components, solve the GNE sequence and run the algorithm.

    Raises:
        GneSeekError: Any failure of the underlying modules

    """
    settings = config.run
    game = build_game(config)
    graph = build_graph(config)
    geometries = build_geometries(config, game)
    schedule = build_schedule(config)
    schedule.check_invariants()

    constants = estimate_constants(game, seed=settings.seed)
    _LOGGER.debug("Game constants: %s", constants)

    solutions = solve_vgne_sequence(game, tol=settings.gne_tol, max_iters=settings.gne_max_iters, constants=constants)

    monitor = None
    observers = []
    if settings.diagnostics or settings.hard_diagnostics:
        monitor = DiagnosticMonitor(
            game,
            constants,
            schedule,
            graph,
            hard=settings.hard_diagnostics,
            l_scale=settings.l_scale,
        )
        observers.append(monitor)

    trace = run(game, graph, geometries, schedule, seed=settings.seed, observers=observers)
    report = build_report(trace, solutions, game, margins=monitor.table if monitor is not None else None)

    return ExperimentResult(
        config=config,
        game=game,
        graph=graph,
        schedule=schedule,
        constants=constants,
        solutions=solutions,
        trace=trace,
        report=report,
    )


def _fmt(value: float) -> str:
    return format(value, FLOAT_FORMAT)


def trace_columns(game: TimeVaryingGame) -> list[str]:
    """Return the trace.csv header for a game."""
    columns = ["t", "alpha_t", "beta_t", "gamma_t"]
    for i, dimension in enumerate(game.action_dims, start=1):
        if dimension == 1:
            columns.append(f"x_{i}")
        else:
            columns.extend(f"x_{i}_{k}" for k in range(1, dimension + 1))
        columns.append(f"lambda_{i}_norm")
    columns.extend(
        [
            "regret_max",
            "violation",
            "path_length",
            "gne_kkt_residual",
            "est_err_margin_min",
            "dual_bound_margin_min",
        ]
    )
    return columns


def trace_frame(result: ExperimentResult) -> pd.DataFrame:
    """Assemble the per-round trace table, one row per round."""
    game, report = result.game, result.report
    margins = report.margins
    rows = []
    for index, snapshot in enumerate(result.trace.snapshots):
        row: list[float] = [snapshot.t, snapshot.alpha, snapshot.beta, snapshot.gamma]
        multiplier_norms = np.linalg.norm(snapshot.multipliers, axis=1)
        for sl, norm in zip(game.slices, multiplier_norms, strict=True):
            row.extend(snapshot.actions[sl].tolist())
            row.append(float(norm))
        row.extend(
            [
                float(report.regret_max[index]),
                float(report.violation[index]),
                float(report.path_length[index]),
                result.solutions[index].kkt_residual,
                margins.round_minimum(index, [BOUND_ESTIMATE_ERROR]) if margins is not None else np.nan,
                margins.round_minimum(index, DUAL_BOUNDS) if margins is not None else np.nan,
            ]
        )
        rows.append(row)

    frame = pd.DataFrame(rows, columns=trace_columns(game), dtype=float)
    frame["t"] = frame["t"].astype(int)
    return frame


def write_trace(result: ExperimentResult, path: Path) -> None:
    """Write trace.csv with 17 significant digits; margins are nan when diagnostics were off."""
    trace_frame(result).to_csv(path, index=False, float_format=f"%{FLOAT_FORMAT}", na_rep="nan", lineterminator="\n")


def _regret_ratio(report: MetricsReport, early: int) -> float:
    early_value = report.average_regret(early)
    if early_value <= 0.0:
        return float("nan")
    return report.average_regret(report.horizon) / early_value


def _tracking_lines(report: MetricsReport) -> list[tuple[str, object]]:
    segments = report.tracking_by_segment(TRACKING_SEGMENTS)
    return [
        ("tracking_error_mean", _fmt(float(report.tracking_error.mean()))),
        ("tracking_error_mean_by_quarter", ", ".join(_fmt(float(value)) for value in segments)),
        ("path_length_per_round", _fmt(float(report.path_length[-1]) / report.horizon)),
    ]


def _average_lines(report: MetricsReport) -> list[tuple[str, object]]:
    horizon = report.horizon
    early = max(horizon // EARLY_FRACTION, 1)
    return [
        ("early_round", early),
        ("avg_regret_at_T", _fmt(report.average_regret(horizon))),
        ("avg_regret_at_early", _fmt(report.average_regret(early))),
        ("avg_regret_ratio", _fmt(_regret_ratio(report, early))),
        ("avg_violation_at_T", _fmt(report.average_violation(horizon))),
        ("avg_violation_at_early", _fmt(report.average_violation(early))),
    ]


def _exponent_lines(report: MetricsReport, schedule: StepSchedule) -> list[tuple[str, object]]:
    lines: list[tuple[str, object]] = []
    for name, fitted, predicted in (
        ("regret", report.regret_exponent, schedule.regret_exponent),
        ("violation", report.violation_exponent, schedule.violation_exponent),
    ):
        if fitted is None:
            lines.append((f"{name}_exponent_fit", f"degenerate ({report.degenerate.get(name, 0)} non-positive)"))
        else:
            lines.append((f"{name}_exponent_fit", _fmt(fitted)))
        lines.append((f"{name}_exponent_predicted", _fmt(predicted)))
    return lines


def summary_lines(result: ExperimentResult) -> list[tuple[str, object]]:
    """Return the key/value pairs written to summary.txt."""
    config, report, game = result.config, result.report, result.game
    horizon = report.horizon
    lines: list[tuple[str, object]] = [
        ("game", config.game.kind),
        ("n_players", game.n_players),
        ("graph", config.graph.kind),
        ("sigma", _fmt(result.graph.sigma)),
        ("sigma_m", _fmt(result.graph.sigma_m)),
        ("geometry", config.geometry.kind),
        ("a1", _fmt(result.schedule.a1)),
        ("a2", _fmt(result.schedule.a2)),
        ("horizon", horizon),
        ("seed", config.run.seed),
        ("constant_L", _fmt(result.constants.L)),
        ("constant_M", _fmt(result.constants.M)),
        ("constant_H", _fmt(result.constants.H)),
        ("constant_mu", _fmt(result.constants.mu)),
        ("regret_max_final", _fmt(float(report.regret_max[-1]))),
        ("violation_final", _fmt(float(report.violation[-1]))),
        ("path_length_final", _fmt(float(report.path_length[-1]))),
        *_average_lines(report),
        *_exponent_lines(report, result.schedule),
        ("fit_window", f"rounds {horizon // 2 + 1}..{horizon}"),
        ("dual_bound_Lambda", _fmt(dual_bound(result.solutions))),
        ("gne_kkt_residual_max", _fmt(max(s.kkt_residual for s in result.solutions))),
    ]

    if config.game.kind == GAME_KIND_COURNOT:
        lines.append(("closed_form_discrepancy", _fmt(closed_form_discrepancy(result.solutions))))
    lines.extend(_tracking_lines(report))

    if report.margins is not None:
        lines.append(("l_scale", _fmt(config.run.l_scale)))
        lines.extend((f"margin_min_{bound}", _fmt(report.margins.minimum(bound))) for bound in BOUNDS)
    else:
        lines.append(("diagnostics", "off"))

    lines.extend(
        [
            ("path_length_convention", "x*_{T+1} := x*_T"),
            ("duration_seconds", f"{result.trace.duration:.3f}"),
        ]
    )
    return lines


def write_summary(result: ExperimentResult, path: Path) -> None:
    """Write summary.txt as key: value lines."""
    text = "".join(f"{key}: {value}\n" for key, value in summary_lines(result))
    path.write_text(text, encoding="utf-8")


def write_outputs(result: ExperimentResult, directory: Path) -> list[Path]:
    """Write the trace, the summary and the verbatim configuration into directory."""
    directory.mkdir(parents=True, exist_ok=True)
    trace_path = directory / TRACE_FILE
    summary_path = directory / SUMMARY_FILE
    config_path = directory / CONFIG_COPY_FILE

    write_trace(result, trace_path)
    write_summary(result, summary_path)
    config_path.write_text(result.config.text, encoding="utf-8")
    return [trace_path, summary_path, config_path]


def _log_headline(result: ExperimentResult) -> None:
    report = result.report
    _LOGGER.info(
        "Final max regret %.6g, violation %.6g, path length %.6g",
        report.regret_max[-1],
        report.violation[-1],
        report.path_length[-1],
    )
    if result.config.game.kind == GAME_KIND_COURNOT:
        discrepancy = closed_form_discrepancy(result.solutions)
        if discrepancy > DISCREPANCY_WARNING:
            _LOGGER.warning("Solver GNE differs from the closed form by %.3e", discrepancy)

    early = max(report.horizon // EARLY_FRACTION, 1)
    ratio = _regret_ratio(report, early)
    if early < report.horizon and ratio > REGRET_DECAY:
        _LOGGER.warning(
            "Average regret at round %d is still %.3g of its value at round %d; "
            "the comparator moves %.3g per round and the mean tracking error is %.3g",
            report.horizon,
            ratio,
            early,
            report.path_length[-1] / report.horizon,
            report.tracking_error.mean(),
        )


def run_experiment(config: RunConfig) -> int:
    """Execute an experiment end to end and return the process exit code.

    Writes trace.csv, summary.txt and config.yaml to run.output. Failures are logged
    and mapped to the exit code of their category.
    """
    status = STATUS_PENDING
    start_time = time.time()
    output = Path(config.run.output)
    _LOGGER.info("Starting %s experiment: T=%d, output %s", config.game.kind, config.run.horizon, output)

    try:
        result = execute(config)
        paths = write_outputs(result, output)
    except GneSeekError as ex:
        status = STATUS_FAILED
        _LOGGER.exception("Experiment %s after %.2f s", status, time.time() - start_time)
        return ex.exit_code
    except OSError:
        status = STATUS_FAILED
        _LOGGER.exception("Experiment %s: cannot write to %s", status, output)
        return EXIT_ERROR

    _log_headline(result)

    status = STATUS_SUCCESS
    _LOGGER.info("Experiment %s in %.2f s; wrote %s", status, time.time() - start_time, ", ".join(map(str, paths)))
    return EXIT_OK
