"""Field functions for the run configuration type system.

Every helper returns a dataclass field whose metadata carries a description and the
voluptuous validator used when the configuration schema is built from the class.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import field

import voluptuous as vol


def kind_field(description: str, kinds: Sequence[str], *, default: str) -> str:
    """Field selecting one of a fixed set of kinds."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(str, vol.In(list(kinds), msg=f"must be one of {', '.join(kinds)}")),
        },
    )


def count_field(description: str, *, minimum: int, default: int | None = None, optional: bool = False) -> int:
    """Field for an integer with a lower bound; required when it has no default and is not optional."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(int, vol.Range(min=minimum, msg=f"must be an integer >= {minimum}")),
            "optional": optional,
        },
    )


def open_interval_field(description: str, low: float, high: float, *, default: float) -> float:
    """Field for a real strictly inside (low, high)."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(
                vol.Coerce(float),
                vol.Range(
                    min=low,
                    max=high,
                    min_included=False,
                    max_included=False,
                    msg=f"must lie strictly inside ({low:.6g}, {high:.6g})",
                ),
            ),
        },
    )


def fraction_field(description: str, *, default: float) -> float:
    """Field for a real in [0, 1)."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(
                vol.Coerce(float),
                vol.Range(min=0.0, max=1.0, min_included=True, max_included=False, msg="must lie in [0, 1)"),
            ),
        },
    )


def positive_field(description: str, *, default: float | None = None, optional: bool = False) -> float | None:
    """Field for a strictly positive real."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(vol.Coerce(float), vol.Range(min=0.0, min_included=False, msg="must be positive")),
            "optional": optional,
        },
    )


def nonnegative_field(description: str, *, default: float) -> float:
    """Field for a non-negative real."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(vol.Coerce(float), vol.Range(min=0.0, msg="must be non-negative")),
        },
    )


def flag_field(description: str, *, default: bool = False) -> bool:
    """Field for a boolean switch."""
    return field(default=default, metadata={"description": description, "schema": bool})


def edges_field(description: str) -> list[list[int]] | None:
    """Field for an explicit list of 1-based undirected edges."""
    return field(
        default=None,
        metadata={
            "description": description,
            "schema": [vol.ExactSequence([int, int], msg="an edge is a pair of vertex numbers")],
            "optional": True,
        },
    )


def path_field(description: str, *, default: str) -> str:
    """Field for a filesystem path."""
    return field(
        default=default,
        metadata={
            "description": description,
            "schema": vol.All(str, vol.Strip, vol.Length(min=1, msg="path cannot be empty")),
        },
    )
