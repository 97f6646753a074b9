"""Schedule section of the run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..const import A1_RANGE, A2_RANGE, DEFAULT_A1, DEFAULT_A2
from .fields import open_interval_field


@dataclass
class ScheduleConfig:
    """Step-size exponents."""

    a1: float = open_interval_field("Primal step exponent", *A1_RANGE, default=DEFAULT_A1)
    a2: float = open_interval_field("Dual regularization exponent", *A2_RANGE, default=DEFAULT_A2)
