"""Exceptions raised by gneseek.

Every error carries an ``exit_code`` so the command line front end can map a failure
to its category without inspecting messages.
"""

from __future__ import annotations

from .const import EXIT_ASSUMPTION, EXIT_BOUND, EXIT_CONFIG, EXIT_ERROR, EXIT_NUMERICAL


class GneSeekError(Exception):
    """Base class for all gneseek errors."""

    exit_code = EXIT_ERROR
    # Set by the round loop when the error escapes a round
    round_index: int | None = None


class ConfigError(GneSeekError):
    """The run configuration could not be used."""

    exit_code = EXIT_CONFIG


class ParseError(ConfigError):
    """The configuration file is malformed or misses a required key."""

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None) -> None:
        """Initialize with the offending dotted key and 1-based source line when known."""
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.key = key
        self.line = line


class ValidationError(ConfigError, ValueError):
    """A configuration or model parameter is outside its allowed range."""

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None) -> None:
        """Initialize with the offending dotted key and 1-based source line when known."""
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.key = key
        self.line = line


class InvalidEdge(ValidationError):
    """An edge is a self-loop or references a vertex outside the graph."""


class DisconnectedGraph(ValidationError):
    """The communication graph is not connected."""


class GeometrySetMismatch(ConfigError, ValueError):
    """The mirror map cannot be paired with the feasible set."""


class AssumptionViolation(GneSeekError):
    """A standing assumption of the algorithm does not hold for the supplied model."""

    exit_code = EXIT_ASSUMPTION


class DegenerateSpectrum(AssumptionViolation):
    """The weight matrix has a spectral constant outside (0, 1)."""


class InfeasibleProblem(AssumptionViolation):
    """No strictly feasible point exists for the coupled constraint."""


class NumericalFailure(GneSeekError):
    """A numerical routine failed or produced non-finite values."""

    exit_code = EXIT_NUMERICAL


class NoConvergence(NumericalFailure):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message: str, *, residual: float) -> None:
        """Initialize with the final residual of the solver."""
        super().__init__(message)
        self.residual = residual


class DomainError(NumericalFailure, ValueError):
    """A point lies outside the domain of the mirror map."""


class NonFiniteInput(NumericalFailure, ValueError):
    """An input vector contains NaN or infinite values."""


class NonFiniteState(NumericalFailure):
    """A player state became NaN or infinite during a round."""


class LengthMismatch(GneSeekError, ValueError):
    """Two sequences that must be aligned have incompatible lengths."""


class DegenerateSeries(GneSeekError, ValueError):
    """A series cannot be fitted on a log scale because it has non-positive values."""

    def __init__(self, message: str, *, n_nonpositive: int) -> None:
        """Initialize with the number of non-positive values in the fit window."""
        super().__init__(message)
        self.n_nonpositive = n_nonpositive


class BoundViolated(GneSeekError):
    """A diagnostic bound was violated while running in hard mode."""

    exit_code = EXIT_BOUND

    def __init__(self, message: str, *, round_index: int, player: int, bound: str, margin: float) -> None:
        """Initialize with the round, player (1-based), bound name and observed margin."""
        super().__init__(message)
        self.round_index = round_index
        self.player = player
        self.bound = bound
        self.margin = margin
