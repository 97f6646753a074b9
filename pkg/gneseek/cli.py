"""Command line front end: ``gneseek run`` and ``gneseek validate``."""

from __future__ import annotations

import argparse
from collections.abc import Sequence
import dataclasses
import logging
import sys

from .config import parse_config
from .const import EXIT_OK
from .exceptions import ConfigError
from .experiment import run_experiment
from .types import RunConfig

_LOGGER = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gneseek",
        description="Distributed online generalized Nash equilibrium seeking experiments",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG instead of INFO")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run the experiment described by a configuration file")
    run_parser.add_argument("config", help="path to the YAML configuration")
    run_parser.add_argument("--out", help="output directory, overriding run.output")
    run_parser.add_argument("--gne-tol", type=float, help="KKT tolerance of the equilibrium solver, overriding run.gne_tol")
    run_parser.add_argument(
        "--hard-diagnostics",
        action="store_true",
        help="fail on the first violated diagnostic bound",
    )

    validate_parser = commands.add_parser("validate", help="parse and validate a configuration without running it")
    validate_parser.add_argument("config", help="path to the YAML configuration")
    return parser


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Return config with the command line overrides applied."""
    changes: dict[str, object] = {}
    if args.out is not None:
        changes["output"] = args.out
    if args.gne_tol is not None:
        changes["gne_tol"] = args.gne_tol
    if args.hard_diagnostics:
        changes["hard_diagnostics"] = True
    if not changes:
        return config
    return dataclasses.replace(config, run=dataclasses.replace(config.run, **changes))


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and return its exit code."""
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = parse_config(args.config)
    except ConfigError as ex:
        _LOGGER.error("Invalid configuration %s: %s", args.config, ex)  # noqa: TRY400 the message is the report
        return ex.exit_code

    if args.command == "validate":
        _LOGGER.info("Configuration %s is valid", args.config)
        return EXIT_OK

    if args.gne_tol is not None and args.gne_tol <= 0.0:
        _LOGGER.error("--gne-tol must be positive, got %s", args.gne_tol)
        return ConfigError.exit_code

    return run_experiment(apply_overrides(config, args))


if __name__ == "__main__":
    sys.exit(main())
