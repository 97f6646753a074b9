"""Test Bregman divergences, feasible sets and the mirror step."""

import numpy as np
import pytest

from gneseek.exceptions import DomainError, GeometrySetMismatch, NonFiniteInput
from gneseek.geometry import (
    BregmanGeometry,
    FeasibleSet,
    GeometryKind,
    ProductSet,
    divergence,
    lipschitz_constant,
    make_geometries,
    make_geometry,
    mirror_step,
    project_simplex,
    triangle_identity_residual,
)

EUCLIDEAN = BregmanGeometry(kind=GeometryKind.EUCLIDEAN, dimension=2)
ENTROPY_2 = BregmanGeometry(kind=GeometryKind.ENTROPY, dimension=2)
ENTROPY_3 = BregmanGeometry(kind=GeometryKind.ENTROPY, dimension=3)
PRODUCTION_BOX = FeasibleSet.box(0.0, 30.0)
RANDOM_INSTANCES = 1000
BRUTE_FORCE_POINTS = 500


@pytest.mark.parametrize(
    ("geometry", "xi", "zeta", "expected"),
    [
        pytest.param(EUCLIDEAN, [3.7, -1.2], [3.7, -1.2], 0.0, id="euclidean identical points"),
        pytest.param(EUCLIDEAN, [1.0, 0.0], [0.0, 0.0], 0.5, id="euclidean unit step"),
        pytest.param(
            ENTROPY_2,
            [0.5, 0.5],
            [0.25, 0.75],
            0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0),
            id="entropy simplex pair",
        ),
    ],
)
def test_divergence_values(geometry: BregmanGeometry, xi: list[float], zeta: list[float], expected: float) -> None:
    """Divergences match direct evaluation."""
    assert divergence(geometry, np.array(xi), np.array(zeta)) == pytest.approx(expected, abs=1e-12)


def test_entropy_divergence_allows_zero_in_first_argument() -> None:
    """0 ln 0 is taken as 0."""
    value = divergence(ENTROPY_2, np.array([1.0, 0.0]), np.array([0.5, 0.5]))

    assert value == pytest.approx(np.log(2.0))


@pytest.mark.parametrize(
    ("xi", "zeta"),
    [
        pytest.param([0.5, 0.5], [1.0, 0.0], id="zero in second argument"),
        pytest.param([-0.1, 1.1], [0.5, 0.5], id="negative first argument"),
        pytest.param([np.nan, 1.0], [0.5, 0.5], id="nan coordinate"),
    ],
)
def test_entropy_divergence_domain(xi: list[float], zeta: list[float]) -> None:
    """Points outside the entropy domain raise DomainError."""
    with pytest.raises(DomainError):
        divergence(ENTROPY_2, np.array(xi), np.array(zeta))


def test_divergence_strong_convexity(rng: np.random.Generator) -> None:
    """Both divergences dominate half the squared distance on the simplex."""
    simplex = FeasibleSet.simplex(3)
    for _ in range(200):
        xi = simplex.sample(rng)
        zeta = np.maximum(simplex.sample(rng), 1e-12)
        half_square = 0.5 * float(np.sum((xi - zeta) ** 2))
        assert divergence(ENTROPY_3, xi, zeta) >= half_square - 1e-12
        euclidean = BregmanGeometry(kind=GeometryKind.EUCLIDEAN, dimension=3)
        assert divergence(euclidean, xi, zeta) == pytest.approx(half_square)


@pytest.mark.parametrize(
    ("center", "direction", "alpha", "expected"),
    [
        pytest.param(5.0, 10.0, 0.3, 2.0, id="interior step"),
        pytest.param(0.0, 5.0, 1.0, 0.0, id="clipped at the floor"),
        pytest.param(29.0, -10.0, 1.0, 30.0, id="clipped at the ceiling"),
    ],
)
def test_euclidean_box_step(center: float, direction: float, alpha: float, expected: float) -> None:
    """The Euclidean box step is the clipped gradient step."""
    geometry = make_geometry("euclidean", PRODUCTION_BOX)

    result = mirror_step(geometry, PRODUCTION_BOX, np.array([center]), np.array([direction]), alpha)

    assert result == pytest.approx([expected], abs=1e-12)


def test_entropy_simplex_step() -> None:
    """The entropy step reweights by exp(-alpha d)."""
    result = mirror_step(ENTROPY_2, FeasibleSet.simplex(2), np.array([0.5, 0.5]), np.array([np.log(2.0), 0.0]), 1.0)

    np.testing.assert_allclose(result, [1 / 3, 2 / 3], atol=1e-12)


def test_zero_direction_is_fixed_point(rng: np.random.Generator) -> None:
    """With d = 0 the step returns the center."""
    box = FeasibleSet.box(-1.0, 2.0, dimension=4)
    simplex = FeasibleSet.simplex(4)
    center_box = box.sample(rng)
    center_simplex = simplex.sample(rng)

    assert np.array_equal(mirror_step(make_geometry("euclidean", box), box, center_box, np.zeros(4), 0.7), center_box)
    np.testing.assert_allclose(
        mirror_step(make_geometry("entropy", simplex, rng=rng), simplex, center_simplex, np.zeros(4), 0.7),
        center_simplex,
        atol=1e-12,
    )


def test_euclidean_box_step_random(rng: np.random.Generator) -> None:
    """Random Euclidean box instances equal the clipped step."""
    box = FeasibleSet.box([-1.0, 0.0, 2.0], [1.0, 5.0, 3.0], dimension=3)
    geometry = make_geometry("euclidean", box)
    for _ in range(RANDOM_INSTANCES):
        center = box.sample(rng)
        direction = rng.normal(scale=5.0, size=3)
        alpha = float(rng.uniform(0.01, 2.0))
        expected = np.clip(center - alpha * direction, box.lower, box.upper)
        np.testing.assert_allclose(mirror_step(geometry, box, center, direction, alpha), expected, atol=1e-12)


def test_entropy_step_beats_random_points(rng: np.random.Generator) -> None:
    """The entropy step minimizes its objective against random feasible points."""
    simplex = FeasibleSet.simplex(3)
    candidates = simplex.sample(rng, BRUTE_FORCE_POINTS)
    for _ in range(20):
        center = np.maximum(simplex.sample(rng), 1e-3)
        center /= center.sum()
        direction = rng.normal(size=3)
        alpha = float(rng.uniform(0.1, 1.0))
        best = mirror_step(ENTROPY_3, simplex, center, direction, alpha)

        def objective(x: np.ndarray, center: np.ndarray = center, d: np.ndarray = direction, a: float = alpha) -> float:
            return a * float(x @ d) + divergence(ENTROPY_3, x, center)

        best_value = objective(best)
        assert simplex.contains(best, 1e-9)
        assert all(best_value <= objective(x) + 1e-9 for x in candidates)


def test_euclidean_simplex_step_projects() -> None:
    """The Euclidean step on the simplex is the sort-based projection."""
    simplex = FeasibleSet.simplex(3)
    geometry = make_geometry("euclidean", simplex)

    result = mirror_step(geometry, simplex, np.array([1 / 3, 1 / 3, 1 / 3]), np.array([-3.0, 0.0, 0.0]), 1.0)

    np.testing.assert_allclose(result, [1.0, 0.0, 0.0], atol=1e-12)


def test_entropy_step_on_box_is_rejected() -> None:
    """Entropy geometry has no closed form on a box."""
    box_entropy = BregmanGeometry(kind=GeometryKind.ENTROPY, dimension=1)

    with pytest.raises(GeometrySetMismatch):
        mirror_step(box_entropy, PRODUCTION_BOX, np.array([1.0]), np.array([0.0]), 1.0)
    with pytest.raises(GeometrySetMismatch):
        make_geometry("entropy", PRODUCTION_BOX)


@pytest.mark.parametrize(
    "direction",
    [
        pytest.param([np.nan], id="nan"),
        pytest.param([np.inf], id="inf"),
    ],
)
def test_non_finite_direction(direction: list[float]) -> None:
    """Non-finite directions are rejected."""
    geometry = make_geometry("euclidean", PRODUCTION_BOX)

    with pytest.raises(NonFiniteInput):
        mirror_step(geometry, PRODUCTION_BOX, np.array([1.0]), np.array(direction), 1.0)


def test_triangle_identity_euclidean(rng: np.random.Generator) -> None:
    """The three-point identity holds exactly for the Euclidean map."""
    geometry = BregmanGeometry(kind=GeometryKind.EUCLIDEAN, dimension=5)
    for _ in range(100):
        xi, zeta, theta = rng.normal(size=(3, 5))
        assert triangle_identity_residual(geometry, xi, zeta, theta) <= 1e-10


def test_triangle_identity_entropy(rng: np.random.Generator) -> None:
    """The three-point identity holds for the entropy map on positive simplex points."""
    uniform = np.full(3, 1 / 3)
    assert triangle_identity_residual(ENTROPY_3, uniform, uniform, uniform) == 0.0

    for _ in range(100):
        xi, zeta, theta = rng.dirichlet(np.ones(3), size=3)
        assert triangle_identity_residual(ENTROPY_3, xi, zeta, theta) <= 1e-9


def test_project_simplex_rows() -> None:
    """Projection works row-wise and keeps feasible points."""
    values = np.array([[0.2, 0.3, 0.5], [2.0, 0.0, 0.0], [-1.0, 0.5, 0.5]])

    projected = project_simplex(values)

    np.testing.assert_allclose(projected[0], [0.2, 0.3, 0.5])
    np.testing.assert_allclose(projected[1], [1.0, 0.0, 0.0])
    np.testing.assert_allclose(projected[2], [0.0, 0.5, 0.5])


def test_feasible_set_geometry() -> None:
    """Radius and diameter of boxes and simplices."""
    assert PRODUCTION_BOX.radius == pytest.approx(30.0)
    assert PRODUCTION_BOX.diameter == pytest.approx(30.0)
    assert FeasibleSet.simplex(3).diameter == pytest.approx(np.sqrt(2.0))
    assert FeasibleSet.simplex(1).diameter == 0.0


def test_invalid_box_bounds() -> None:
    """Boxes need ordered finite bounds."""
    with pytest.raises(ValueError, match="must not exceed"):
        FeasibleSet.box(1.0, 0.0)
    with pytest.raises(ValueError, match="finite"):
        FeasibleSet.box(0.0, np.inf)


def test_product_set_projection(rng: np.random.Generator) -> None:
    """Product projection matches projecting each block."""
    sets = [FeasibleSet.box(0.0, 1.0, dimension=2), FeasibleSet.simplex(3)]
    product = ProductSet(sets)
    x = rng.normal(size=product.dimension)

    projected = product.project(x)

    assert product.dimension == 5
    np.testing.assert_allclose(projected[:2], np.clip(x[:2], 0.0, 1.0))
    np.testing.assert_allclose(projected[2:], project_simplex(x[2:]))
    assert product.contains(projected, 1e-12)
    assert product.sample(rng, 7).shape == (7, 5)


@pytest.mark.parametrize(
    ("lower", "upper", "dimension"),
    [
        pytest.param(0.0, 30.0, 1, id="production box"),
        pytest.param([-1.0, 0.0], [2.0, 4.0], 2, id="rectangle"),
        pytest.param(0.0, 1.0, 5, id="unit cube"),
    ],
)
def test_box_lipschitz_is_diameter(
    lower: float | list[float], upper: float | list[float], dimension: int, rng: np.random.Generator
) -> None:
    """For boxes K is the diameter and bounds the sampled divergence differences."""
    box = FeasibleSet.box(lower, upper, dimension)
    geometry = make_geometry(GeometryKind.EUCLIDEAN, box)

    assert geometry.lipschitz_K == pytest.approx(box.diameter)
    for _ in range(BRUTE_FORCE_POINTS):
        first, second, anchor = box.sample(rng, 3)
        gap = abs(divergence(geometry, first, anchor) - divergence(geometry, second, anchor))
        assert gap <= geometry.lipschitz_K * np.linalg.norm(first - second) + 1e-9


def test_entropy_lipschitz_estimate_is_positive(rng: np.random.Generator) -> None:
    """The sampled entropy Lipschitz constant is finite and positive."""
    value = lipschitz_constant(GeometryKind.ENTROPY, FeasibleSet.simplex(3), rng=rng, samples=2000)

    assert np.isfinite(value)
    assert value > 0.0


def test_make_geometries_shares_simplex_estimate(rng: np.random.Generator) -> None:
    """Identical simplices share one geometry object."""
    geometries = make_geometries("entropy", [FeasibleSet.simplex(3)] * 4, rng=rng)

    assert len(geometries) == 4
    assert all(geometry is geometries[0] for geometry in geometries)
