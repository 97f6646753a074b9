"""Centralized computation of the per-round variational GNE used as the regret comparator."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging

import numpy as np
from pulp import LpMaximize, LpProblem, LpStatus, LpVariable, lpSum, value

from .const import DEFAULT_GNE_MAX_ITERS, DEFAULT_GNE_TOL
from .exceptions import InfeasibleProblem, LengthMismatch, NoConvergence
from .game import GameConstants, TimeVaryingGame, estimate_constants
from .game.cournot import PRODUCTION_LIMIT, season
from .geometry import SetKind

_LOGGER = logging.getLogger(__name__)

# Divergence is declared once the residual grows this much beyond its starting value
DIVERGENCE_FACTOR = 1e6
MAX_STEP_HALVINGS = 30
HISTORY_LENGTH = 100
SLATER_SAMPLES = 1_000


@dataclass(frozen=True)
class GneSolution:
    """Variational GNE of one round.

    Attributes:
        actions: Stacked equilibrium actions x*_t
        multiplier: Shared multiplier lambda*_t >= 0
        kkt_residual: Largest of the stationarity, feasibility and complementarity residuals
        iterations: Iterations used by the final (non-restarted) attempt
        residual_history: KKT residuals of the last iterations, oldest first

    """

    actions: np.ndarray
    multiplier: np.ndarray
    kkt_residual: float
    iterations: int
    residual_history: tuple[float, ...] = ()


def kkt_residual(game: TimeVaryingGame, t: int, actions: np.ndarray, multiplier: np.ndarray) -> float:
    """Return the KKT residual of (x, lambda) for the variational GNE at round t.

    Stationarity is measured as ||x - P_Omega(x - (F_t(x) + grad g_t(x)^T lambda))|| with a
    unit trial step.
    """
    pseudo = game.pseudo_gradient(actions, t)
    jacobian = game.aggregate_jacobian(actions, t)
    constraint = game.aggregate_constraint(actions, t)

    stationarity = float(np.linalg.norm(actions - game.product.project(actions - pseudo - jacobian.T @ multiplier)))
    feasibility = float(np.linalg.norm(np.maximum(constraint, 0.0)))
    complementarity = abs(float(multiplier @ constraint))
    return max(stationarity, feasibility, complementarity)


def _attempt(
    game: TimeVaryingGame,
    t: int,
    start: tuple[np.ndarray, np.ndarray],
    primal_step: float,
    dual_step: float,
    tol: float,
    max_iters: int,
) -> GneSolution | None:
    """Run the projected primal-dual iteration once; None signals divergence."""
    x, lam = start
    history: list[float] = []
    limit: float | None = None

    for iteration in range(max_iters + 1):
        pseudo = game.pseudo_gradient(x, t)
        jacobian = game.aggregate_jacobian(x, t)
        constraint = game.aggregate_constraint(x, t)
        residual = max(
            float(np.linalg.norm(x - game.product.project(x - pseudo - jacobian.T @ lam))),
            float(np.linalg.norm(np.maximum(constraint, 0.0))),
            abs(float(lam @ constraint)),
        )
        if limit is None:
            limit = DIVERGENCE_FACTOR * max(residual, 1.0)
        if not np.isfinite(residual) or residual > limit:
            return None

        history.append(residual)
        if residual <= tol:
            return GneSolution(
                actions=x,
                multiplier=lam,
                kkt_residual=residual,
                iterations=iteration,
                residual_history=tuple(history[-HISTORY_LENGTH:]),
            )
        if iteration == max_iters:
            break

        x = game.product.project(x - primal_step * (pseudo + jacobian.T @ lam))
        lam = np.maximum(lam + dual_step * game.aggregate_constraint(x, t), 0.0)
        if len(history) > 2 * HISTORY_LENGTH:
            del history[:HISTORY_LENGTH]

    msg = f"VGNE solver did not reach tolerance {tol:.1e} at round {t} within {max_iters} iterations"
    raise NoConvergence(msg, residual=history[-1])


def solve_vgne(
    game: TimeVaryingGame,
    t: int,
    *,
    tol: float = DEFAULT_GNE_TOL,
    max_iters: int = DEFAULT_GNE_MAX_ITERS,
    initial: tuple[np.ndarray, np.ndarray] | None = None,
    constants: GameConstants | None = None,
    check_slater: bool = True,
) -> GneSolution:
    """Compute the variational GNE of round t.

    Iterates x <- P_Omega(x - eta_p (F_t(x) + grad g_t(x)^T lambda)) and
    lambda <- [lambda + eta_d g_t(x)]_+ with eta_p = mu / H^2 and eta_d = eta_p / max(1, ||grad g_t||^2)
    until the KKT residual reaches tol. Both steps are halved and the solve restarted
    whenever the residual blows up.

    Args:
        game: Game to solve
        t: Round index (1-based)
        tol: KKT residual tolerance
        max_iters: Iteration limit per attempt
        initial: Warm start (actions, multiplier); defaults to the projection of 0 and lambda = 0
        constants: Game constants; estimated when omitted
        check_slater: Whether to verify a strictly feasible point exists first

    Returns:
        The solution with its KKT certificate

    Raises:
        InfeasibleProblem: If the Slater check fails at t
        NoConvergence: If the residual does not reach tol

    """
    if check_slater:
        require_slater(game, t)
    if constants is None:
        constants = estimate_constants(game)

    if initial is None:
        start = (game.product.project(np.zeros(game.dimension)), np.zeros(game.constraint_dim))
    else:
        start = (game.product.project(np.asarray(initial[0], dtype=float)), np.asarray(initial[1], dtype=float))

    primal_step = constants.mu / constants.H**2
    jacobian_norm = float(np.linalg.norm(game.aggregate_jacobian(start[0], t), 2))
    dual_step = primal_step / max(1.0, jacobian_norm**2)

    for halving in range(MAX_STEP_HALVINGS + 1):
        solution = _attempt(game, t, start, primal_step, dual_step, tol, max_iters)
        if solution is not None:
            _LOGGER.debug(
                "VGNE at t=%d: residual %.3e after %d iterations (%d halvings)",
                t,
                solution.kkt_residual,
                solution.iterations,
                halving,
            )
            return solution
        primal_step /= 2.0
        dual_step /= 2.0
        _LOGGER.debug("VGNE solver diverged at t=%d; halving steps to %.3e", t, primal_step)

    msg = f"VGNE solver diverged at round {t} after {MAX_STEP_HALVINGS} step halvings"
    raise NoConvergence(msg, residual=float("inf"))


def solve_vgne_sequence(
    game: TimeVaryingGame,
    *,
    tol: float = DEFAULT_GNE_TOL,
    max_iters: int = DEFAULT_GNE_MAX_ITERS,
    constants: GameConstants | None = None,
) -> list[GneSolution]:
    """Solve rounds 1..T in order, warm-starting each solve from the previous round."""
    if constants is None:
        constants = estimate_constants(game)

    solutions: list[GneSolution] = []
    initial: tuple[np.ndarray, np.ndarray] | None = None
    for t in range(1, game.horizon + 1):
        solution = solve_vgne(game, t, tol=tol, max_iters=max_iters, initial=initial, constants=constants)
        solutions.append(solution)
        initial = (solution.actions, solution.multiplier)

    _LOGGER.info(
        "Solved %d rounds; max KKT residual %.3e, Lambda %.6g",
        len(solutions),
        max(s.kkt_residual for s in solutions),
        dual_bound(solutions),
    )
    return solutions


def dual_bound(solutions: Sequence[GneSolution]) -> float:
    """Return Lambda = max_t ||lambda*_t|| over a solved sequence."""
    return max((float(np.linalg.norm(s.multiplier)) for s in solutions), default=0.0)


def cournot_closed_form(i: int, t: int) -> float:
    """Return the published closed-form equilibrium action of firm i (1-based) at round t."""
    xi = (i - 10) / 9.0 + (10 - i) / 2.0 * float(season(t))
    return float(np.clip(xi, 0.0, PRODUCTION_LIMIT))


def closed_form_discrepancy(solutions: Sequence[GneSolution]) -> float:
    """Return max_t ||x*_t - closed form||_inf for a solved Cournot sequence."""
    worst = 0.0
    for t, solution in enumerate(solutions, start=1):
        closed = np.array([cournot_closed_form(i, t) for i in range(1, solution.actions.size + 1)])
        worst = max(worst, float(np.max(np.abs(solution.actions - closed))))
    return worst


def path_hops(gne_sequence: Sequence[np.ndarray], horizon: int | None = None) -> np.ndarray:
    """Return the hop lengths ||x*_{t+1} - x*_t|| for t = 1..T.

    A sequence of T profiles uses the convention x*_{T+1} := x*_T, so its final hop is
    zero; a sequence of T + 1 profiles yields T hops as is.

    Raises:
        LengthMismatch: If horizon is given and the sequence has neither T nor T + 1 profiles

    """
    count = len(gne_sequence)
    if horizon is not None and count not in (horizon, horizon + 1):
        msg = f"Expected {horizon} or {horizon + 1} GNE profiles, got {count}"
        raise LengthMismatch(msg)
    if count == 0:
        return np.zeros(0)
    profiles = np.asarray(gne_sequence, dtype=float)
    hops = np.linalg.norm(np.diff(profiles, axis=0), axis=1)
    if horizon is None or count == horizon:
        hops = np.append(hops, 0.0)
    return hops


def path_length(gne_sequence: Sequence[np.ndarray], horizon: int | None = None) -> float:
    """Return Phi*_T = sum_t ||x*_{t+1} - x*_t|| over stacked action vectors (see path_hops)."""
    hops = path_hops(gne_sequence, horizon)
    return float(np.cumsum(hops)[-1]) if hops.size else 0.0


def _lp_margin(game: TimeVaryingGame, t: int) -> float:
    """Solve max s s.t. g_t(x) + s 1 <= 0, x in Omega for affine constraints."""
    prob = LpProblem(f"slater_t{t}", LpMaximize)
    margin = LpVariable("margin")
    prob += margin, "Slater_Margin"

    anchor = game.product.project(np.zeros(game.dimension))
    coordinates = []
    for i, (feasible_set, sl) in enumerate(zip(game.feasible_sets, game.slices, strict=True)):
        if feasible_set.kind is SetKind.BOX:
            block = [
                LpVariable(f"x_{i}_{k}", lowBound=float(lo), upBound=float(hi))
                for k, (lo, hi) in enumerate(zip(feasible_set.lower, feasible_set.upper, strict=True))
            ]
        else:
            block = [LpVariable(f"x_{i}_{k}", lowBound=0.0) for k in range(feasible_set.dimension)]
            prob += lpSum(block) == 1, f"Simplex_{i}"
        coordinates.append((block, anchor[sl]))

    rows = [[] for _ in range(game.constraint_dim)]
    offsets = np.zeros(game.constraint_dim)
    for i, (block, point) in enumerate(coordinates):
        jacobian = game.constraint_jacobian(i, point, t)
        offsets += game.constraint(i, point, t) - jacobian @ point
        for j in range(game.constraint_dim):
            rows[j].extend(float(jacobian[j, k]) * variable for k, variable in enumerate(block))

    for j, row in enumerate(rows):
        prob += lpSum(row) + float(offsets[j]) + margin <= 0, f"Coupled_{j}"

    status = prob.solve()
    if status != 1:
        msg = f"Slater LP at round {t} failed with status: {LpStatus[status]}"
        raise InfeasibleProblem(msg)
    return float(value(margin))


def slater_margin(game: TimeVaryingGame, t: int, *, method: str = "auto", seed: int = 0) -> float:
    """Return a lower bound on max_x -max_j g_t(x)_j over Omega; positive means Slater holds.

    Args:
        game: Game to check
        t: Round index
        method: "point" uses the game's known strictly feasible point, "lp" solves the
            exact LP (affine constraints only), "sample" takes the best of random points,
            and "auto" tries them in that order
        seed: Seed for the sampling fallback

    """
    if method in ("auto", "point"):
        point = game.slater_point(t)
        if point is not None:
            point_margin = -float(np.max(game.aggregate_constraint(point, t)))
            if point_margin > 0.0 or method == "point":
                return point_margin
    if method in ("auto", "lp") and game.affine_constraints:
        return _lp_margin(game, t)
    if method == "lp":
        msg = "The Slater LP needs affine constraints"
        raise ValueError(msg)

    rng = np.random.default_rng(seed)
    samples = game.product.sample(rng, SLATER_SAMPLES)
    return max(-float(np.max(game.aggregate_constraint(x, t))) for x in samples)


def require_slater(game: TimeVaryingGame, t: int) -> float:
    """Check Slater's condition at round t and return the margin.

    Raises:
        InfeasibleProblem: If no strictly feasible point was found

    """
    margin = slater_margin(game, t)
    if not margin > 0.0:
        msg = f"No strictly feasible point for the coupled constraint at round {t} (margin {margin:.6g})"
        raise InfeasibleProblem(msg)
    return margin
