"""Distributed online generalized Nash equilibrium seeking by primal-dual mirror descent."""

from .config import parse_config, parse_config_text
from .engine import RoundSnapshot, RunTrace, StepSchedule, run, run_full_information
from .equilibrium import GneSolution, kkt_residual, path_length, slater_margin, solve_vgne, solve_vgne_sequence
from .exceptions import GneSeekError
from .experiment import execute, run_experiment
from .game import GameConstants, OracleGame, TimeVaryingGame, create_game, estimate_constants, register_game
from .geometry import BregmanGeometry, FeasibleSet, ProductSet, divergence, make_geometry, mirror_step
from .graph import GraphTopology, build_metropolis, build_topology, from_weights
from .metrics import (
    DiagnosticMonitor,
    MetricsReport,
    StreamingMetrics,
    build_report,
    constraint_violation,
    diagnostic_margins,
    dynamic_regret,
    fit_exponent,
)

__version__ = "0.1.0"

__all__ = [
    "BregmanGeometry",
    "DiagnosticMonitor",
    "FeasibleSet",
    "GameConstants",
    "GneSeekError",
    "GneSolution",
    "GraphTopology",
    "MetricsReport",
    "OracleGame",
    "ProductSet",
    "RoundSnapshot",
    "RunTrace",
    "StepSchedule",
    "StreamingMetrics",
    "TimeVaryingGame",
    "build_metropolis",
    "build_report",
    "build_topology",
    "constraint_violation",
    "create_game",
    "diagnostic_margins",
    "divergence",
    "dynamic_regret",
    "estimate_constants",
    "execute",
    "fit_exponent",
    "from_weights",
    "kkt_residual",
    "make_geometry",
    "mirror_step",
    "parse_config",
    "parse_config_text",
    "path_length",
    "register_game",
    "run",
    "run_experiment",
    "run_full_information",
    "slater_margin",
    "solve_vgne",
    "solve_vgne_sequence",
]
