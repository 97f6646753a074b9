"""Test the variational GNE solver and its helpers."""

import numpy as np
import pytest

from gneseek.equilibrium import (
    GneSolution,
    closed_form_discrepancy,
    cournot_closed_form,
    dual_bound,
    kkt_residual,
    path_hops,
    path_length,
    require_slater,
    slater_margin,
    solve_vgne,
    solve_vgne_sequence,
)
from gneseek.exceptions import InfeasibleProblem, LengthMismatch, NoConvergence
from gneseek.game import CournotGame, OracleGame, SimplexTestGame, estimate_constants
from gneseek.game.cournot import season
from gneseek.geometry import FeasibleSet, project_simplex

GNE_TOL = 1e-8
VI_SAMPLES = 1000
RESTARTS = 5


def _infeasible_game() -> OracleGame:
    """g_i(x_i) = x_i + 1 on [0, 2] is positive everywhere."""
    return OracleGame(
        [FeasibleSet.box(0.0, 2.0)] * 2,
        constraint_dim=1,
        horizon=1,
        cost=lambda i, x, t: 0.5 * x[i] ** 2,  # noqa: ARG005
        gradient=lambda i, x, t: np.array([x[i]]),  # noqa: ARG005
        constraint=lambda i, x_i, t: x_i + 1.0,  # noqa: ARG005
        constraint_jacobian=lambda i, x_i, t: np.ones((1, 1)),  # noqa: ARG005
        affine_constraints=True,
    )


def test_cournot_solution_certificate(cournot: CournotGame) -> None:
    """The Cournot solution is feasible, stationary and complementary."""
    solution = solve_vgne(cournot, 5, tol=GNE_TOL)

    assert solution.kkt_residual <= GNE_TOL
    assert cournot.product.contains(solution.actions)
    assert np.all(solution.multiplier >= 0.0)
    assert cournot.aggregate_constraint(solution.actions, 5)[0] <= GNE_TOL
    assert kkt_residual(cournot, 5, solution.actions, solution.multiplier) == pytest.approx(solution.kkt_residual)


def test_cournot_interior_equilibrium(cournot: CournotGame) -> None:
    """With the capacity inactive the solution solves F_t(x) = 0."""
    t = 11
    solution = solve_vgne(cournot, t, tol=1e-10)
    n = cournot.n_players
    s = float(season(t))
    # (I + 11^T) x = c - (s + 1)
    expected = np.linalg.solve(np.eye(n) + np.ones((n, n)), cournot.price_intercept(t) - (s + 1.0))

    np.testing.assert_allclose(solution.actions, expected, atol=1e-7)
    assert solution.multiplier[0] == 0.0


def test_decoupled_simplex_game_projects_targets() -> None:
    """Without coupling and with an inactive cap the GNE is the projection of the targets."""
    game = SimplexTestGame(n_players=3, horizon=10, dimension=3, coupling=0.0, capacity=5.0, amplitude=0.5)
    t = 4

    solution = solve_vgne(game, t, tol=GNE_TOL)

    expected = project_simplex(game.targets(t)).reshape(-1)
    np.testing.assert_allclose(solution.actions, expected, atol=1e-7)


def test_active_constraint_satisfies_variational_inequality(rng: np.random.Generator) -> None:
    """With a binding cap, F_t(x*)^T (x - x*) >= 0 over feasible samples."""
    game = SimplexTestGame(n_players=4, horizon=10, capacity=0.1)
    t = 3
    solution = solve_vgne(game, t, tol=GNE_TOL)
    pseudo = game.pseudo_gradient(solution.actions, t)

    # Pull every sample towards the Slater point until the affine cap holds
    anchor = game.slater_point(t)
    anchor_value = float(game.aggregate_constraint(anchor, t)[0])
    feasible = []
    for x in game.product.sample(rng, VI_SAMPLES):
        sample_value = float(game.aggregate_constraint(x, t)[0])
        weight = 1.0 if sample_value <= 0.0 else anchor_value / (anchor_value - sample_value)
        feasible.append(anchor + weight * (x - anchor))

    assert solution.multiplier[0] > 0.0
    assert all(game.aggregate_constraint(x, t)[0] <= 1e-12 for x in feasible)
    assert min(float(pseudo @ (x - solution.actions)) for x in feasible) >= -1e-6


def test_random_restarts_agree(simplex_game: SimplexTestGame, rng: np.random.Generator) -> None:
    """The variational GNE is unique, so restarts agree."""
    constants = estimate_constants(simplex_game, 1000)
    reference = solve_vgne(simplex_game, 2, tol=GNE_TOL, constants=constants).actions

    for _ in range(RESTARTS):
        start = (simplex_game.product.sample(rng), rng.uniform(0.0, 1.0, size=1))
        solution = solve_vgne(simplex_game, 2, tol=GNE_TOL, initial=start, constants=constants)
        np.testing.assert_allclose(solution.actions, reference, atol=1e-7)


def test_residual_tail_is_non_increasing(cournot: CournotGame) -> None:
    """Once the steps are stable the residual decreases monotonically."""
    solution = solve_vgne(cournot, 8, tol=1e-10)
    history = np.array(solution.residual_history)

    assert history.size > 1
    assert np.all(np.diff(history) <= 1e-14)


def test_no_convergence_reports_residual(cournot: CournotGame) -> None:
    """Hitting the iteration limit raises with the last residual."""
    with pytest.raises(NoConvergence) as excinfo:
        solve_vgne(cournot, 1, tol=1e-14, max_iters=2)

    assert excinfo.value.residual > 1e-14


def test_infeasible_game_is_rejected() -> None:
    """The solver refuses rounds without a strictly feasible point."""
    game = _infeasible_game()

    with pytest.raises(InfeasibleProblem):
        solve_vgne(game, 1)


def test_sequence_is_warm_started(cournot: CournotGame) -> None:
    """The sequence solver covers every round and reports Lambda."""
    solutions = solve_vgne_sequence(cournot, tol=GNE_TOL)

    assert len(solutions) == cournot.horizon
    assert all(solution.kkt_residual <= GNE_TOL for solution in solutions)
    assert dual_bound(solutions) == 0.0


@pytest.mark.parametrize(
    ("i", "t", "expected"),
    [
        pytest.param(10, 1, 0.0, id="firm ten at round one"),
        pytest.param(10, 250, 0.0, id="firm ten at round 250"),
        pytest.param(19, 0, 1.0, id="firm nineteen without season"),
        pytest.param(1, 0, 0.0, id="firm one clipped at zero"),
    ],
)
def test_cournot_closed_form(i: int, t: int, expected: float) -> None:
    """The closed form clips (i-10)/9 + (10-i)/2 sin(t/12) to the box."""
    assert cournot_closed_form(i, t) == pytest.approx(expected, abs=1e-15)


def test_closed_form_discrepancy_of_closed_form_is_zero() -> None:
    """A sequence equal to the closed form has zero discrepancy."""
    solutions = [
        GneSolution(
            actions=np.array([cournot_closed_form(i, t) for i in range(1, 21)]),
            multiplier=np.zeros(1),
            kkt_residual=0.0,
            iterations=0,
        )
        for t in range(1, 6)
    ]

    assert closed_form_discrepancy(solutions) == 0.0


def test_path_length_examples() -> None:
    """Constant sequences have zero length and a unit hop has length one."""
    constant = [np.ones(3)] * 4

    assert path_length(constant) == 0.0
    assert path_length([np.zeros(2), np.array([1.0, 0.0])]) == pytest.approx(1.0)


def test_path_length_matches_direct_sum() -> None:
    """The closed-form Cournot path matches a direct summation of hop norms."""
    horizon = 50
    profiles = [np.array([cournot_closed_form(i, t) for i in range(1, 21)]) for t in range(1, horizon + 1)]

    direct = sum(float(np.linalg.norm(b - a)) for a, b in zip(profiles[:-1], profiles[1:], strict=True))

    assert path_length(profiles, horizon) == pytest.approx(direct, rel=1e-12)
    assert path_hops(profiles, horizon)[-1] == 0.0


def test_path_hops_with_extra_profile() -> None:
    """T + 1 profiles give T hops with no padding."""
    profiles = [np.array([float(t)]) for t in range(4)]

    np.testing.assert_array_equal(path_hops(profiles, 3), [1.0, 1.0, 1.0])


def test_path_hops_length_mismatch() -> None:
    """Sequences that are neither T nor T + 1 long are rejected."""
    with pytest.raises(LengthMismatch):
        path_hops([np.zeros(1)] * 3, 5)


def test_slater_margin_lp_matches_capacity() -> None:
    """For Cournot the LP margin is the total capacity at zero production."""
    game = CournotGame(n_players=5, horizon=10)
    t = 6

    margin = slater_margin(game, t, method="lp")

    assert margin == pytest.approx(5 * (10.0 + float(season(t))), rel=1e-6)


def test_slater_margin_methods_agree_on_sign(simplex_game: SimplexTestGame) -> None:
    """The point, LP and sampling checks all find Slater points."""
    for method in ("point", "lp", "sample", "auto"):
        assert slater_margin(simplex_game, 1, method=method) > 0.0


def test_require_slater_rejects_infeasible() -> None:
    """A positive constraint everywhere fails the check."""
    game = _infeasible_game()

    assert slater_margin(game, 1, method="lp") == pytest.approx(-2.0)
    with pytest.raises(InfeasibleProblem, match="No strictly feasible point"):
        require_slater(game, 1)
