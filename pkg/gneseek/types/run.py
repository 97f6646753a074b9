"""Run section of the run configuration."""

from __future__ import annotations

from dataclasses import dataclass

from ..const import DEFAULT_GNE_MAX_ITERS, DEFAULT_GNE_TOL, DEFAULT_OUTPUT, DEFAULT_SEED
from .fields import count_field, flag_field, path_field, positive_field


@dataclass
class RunSettings:
    """Experiment settings."""

    horizon: int = count_field("Number of rounds T", minimum=1)
    seed: int = count_field("Seed of the initial actions and of constant sampling", minimum=0, default=DEFAULT_SEED)
    diagnostics: bool = flag_field("Record bound margins")
    hard_diagnostics: bool = flag_field("Stop at the first violated bound")
    gne_tol: float = positive_field("KKT tolerance of the equilibrium solver", default=DEFAULT_GNE_TOL)
    gne_max_iters: int = count_field("Iteration limit of the equilibrium solver", minimum=1, default=DEFAULT_GNE_MAX_ITERS)
    output: str = path_field("Output directory", default=DEFAULT_OUTPUT)
    l_scale: float = positive_field("Multiplier applied to L in the diagnostic bounds", default=1.0)
