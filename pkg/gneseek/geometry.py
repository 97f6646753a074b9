"""Bregman divergences, feasible sets and the closed-form mirror descent step."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum
import logging

import numpy as np
from scipy.special import rel_entr, softmax

from .const import (
    CLAMP_TOL,
    ENTROPY_LIPSCHITZ_INFLATION,
    ENTROPY_LIPSCHITZ_SAMPLES,
    GEOMETRY_KIND_ENTROPY,
    GEOMETRY_KIND_EUCLIDEAN,
    SIMPLEX_FLOOR,
)
from .exceptions import DomainError, GeometrySetMismatch, NonFiniteInput

_LOGGER = logging.getLogger(__name__)


class GeometryKind(StrEnum):
    """Supported mirror maps."""

    EUCLIDEAN = GEOMETRY_KIND_EUCLIDEAN
    ENTROPY = GEOMETRY_KIND_ENTROPY


class SetKind(StrEnum):
    """Supported feasible set shapes."""

    BOX = "box"
    SIMPLEX = "simplex"


def project_simplex(values: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex along the last axis."""
    v = np.atleast_2d(np.asarray(values, dtype=float))
    n_features = v.shape[-1]
    u = np.sort(v, axis=-1)[..., ::-1]
    cssv = np.cumsum(u, axis=-1) - 1.0
    ind = np.arange(1, n_features + 1)
    rho = np.count_nonzero(u - cssv / ind > 0, axis=-1)
    theta = np.take_along_axis(cssv, (rho - 1)[..., np.newaxis], axis=-1) / rho[..., np.newaxis]
    projected = np.maximum(v - theta, 0.0)
    return projected.reshape(np.shape(values))


@dataclass(frozen=True, eq=False)
class FeasibleSet:
    """Compact convex feasible set of one player.

    Attributes:
        kind: Box or simplex
        dimension: Number of coordinates n_i
        lower: Per-coordinate lower bounds (boxes only)
        upper: Per-coordinate upper bounds (boxes only)

    """

    kind: SetKind
    dimension: int
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    @classmethod
    def box(cls, lower: float | Sequence[float], upper: float | Sequence[float], dimension: int = 1) -> FeasibleSet:
        """Create a box [lower, upper] (scalars are broadcast over the dimension)."""
        lo = np.broadcast_to(np.asarray(lower, dtype=float), (dimension,)).copy()
        hi = np.broadcast_to(np.asarray(upper, dtype=float), (dimension,)).copy()
        if np.any(lo > hi):
            msg = "Box lower bounds must not exceed upper bounds"
            raise ValueError(msg)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            msg = "Box bounds must be finite"
            raise ValueError(msg)
        lo.flags.writeable = False
        hi.flags.writeable = False
        return cls(kind=SetKind.BOX, dimension=dimension, lower=lo, upper=hi)

    @classmethod
    def simplex(cls, dimension: int) -> FeasibleSet:
        """Create the probability simplex of the given dimension."""
        if dimension < 1:
            msg = f"Simplex dimension must be positive, got {dimension}"
            raise ValueError(msg)
        return cls(kind=SetKind.SIMPLEX, dimension=dimension)

    @property
    def radius(self) -> float:
        """Return max ||x|| over the set."""
        if self.kind is SetKind.BOX:
            return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))
        return 1.0

    @property
    def diameter(self) -> float:
        """Return max ||x - y|| over the set."""
        if self.kind is SetKind.BOX:
            return float(np.linalg.norm(self.upper - self.lower))
        return float(np.sqrt(2.0)) if self.dimension > 1 else 0.0

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        """Return whether x lies in the set up to tol."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dimension,):
            return False
        if self.kind is SetKind.BOX:
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return bool(np.all(x >= -tol) and abs(float(x.sum()) - 1.0) <= tol)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Return the Euclidean projection of x onto the set."""
        if self.kind is SetKind.BOX:
            return np.clip(x, self.lower, self.upper)
        return project_simplex(x)

    def clamp(self, x: np.ndarray) -> np.ndarray:
        """Remove floating point drift from a point that should already be feasible."""
        if self.kind is SetKind.BOX:
            return np.clip(x, self.lower, self.upper)
        x = np.maximum(x, 0.0)
        total = float(x.sum())
        if abs(total - 1.0) > CLAMP_TOL:
            x = x / total
        return x

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw uniformly distributed points from the set."""
        shape = (self.dimension,) if size is None else (size, self.dimension)
        if self.kind is SetKind.BOX:
            return rng.uniform(self.lower, self.upper, size=shape)
        return rng.dirichlet(np.ones(self.dimension), size=size)


class ProductSet:
    """Cartesian product of the players' feasible sets over a stacked action vector."""

    def __init__(self, sets: Sequence[FeasibleSet]) -> None:
        """Initialize the product from per-player sets."""
        self.sets = tuple(sets)
        bounds = np.cumsum([0, *(s.dimension for s in self.sets)])
        self.slices = [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:], strict=True)]
        self.dimension = int(bounds[-1])

        self._all_boxes = all(s.kind is SetKind.BOX for s in self.sets)
        self._uniform_simplex = all(s.kind is SetKind.SIMPLEX for s in self.sets) and (
            len({s.dimension for s in self.sets}) == 1
        )
        if self._all_boxes:
            self.lower = np.concatenate([s.lower for s in self.sets])
            self.upper = np.concatenate([s.upper for s in self.sets])

    def project(self, x: np.ndarray) -> np.ndarray:
        """Return the Euclidean projection of a stacked vector onto the product."""
        if self._all_boxes:
            return np.clip(x, self.lower, self.upper)
        if self._uniform_simplex:
            return project_simplex(x.reshape(len(self.sets), -1)).reshape(-1)
        return np.concatenate([s.project(x[sl]) for s, sl in zip(self.sets, self.slices, strict=True)])

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        """Return whether every block lies in its set up to tol."""
        return all(s.contains(x[sl], tol) for s, sl in zip(self.sets, self.slices, strict=True))

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw stacked points with every block sampled from its own set."""
        return np.concatenate([s.sample(rng, size) for s in self.sets], axis=-1)


@dataclass(frozen=True)
class BregmanGeometry:
    """Mirror map of one player.

    Euclidean uses phi(x) = 0.5 ||x||^2 so the mirror step is the projected gradient
    step. Entropy uses phi(x) = sum_j x_j ln x_j and is paired with the simplex.

    Attributes:
        kind: Mirror map family
        dimension: Number of coordinates n_i
        strong_convexity: Modulus mu_i of phi
        lipschitz_K: Lipschitz constant of the divergence in its first argument over the feasible set

    """

    kind: GeometryKind
    dimension: int
    strong_convexity: float = 1.0
    lipschitz_K: float = 1.0

    def potential_gradient(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the mirror map gradient of phi at x."""
        if self.kind is GeometryKind.EUCLIDEAN:
            return np.asarray(x, dtype=float)
        _check_entropy_domain(x, strict=True)
        return np.log(x) + 1.0


def _check_entropy_domain(x: np.ndarray, *, strict: bool) -> None:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        msg = "Point contains non-finite coordinates"
        raise DomainError(msg)
    if strict and np.any(x <= 0.0):
        msg = "Negative entropy requires strictly positive coordinates"
        raise DomainError(msg)
    if not strict and np.any(x < 0.0):
        msg = "Negative entropy requires non-negative coordinates"
        raise DomainError(msg)


def divergence(geometry: BregmanGeometry, xi: np.ndarray, zeta: np.ndarray) -> float:
    """Evaluate the Bregman divergence D(xi, zeta).

    Raises:
        DomainError: If zeta has a non-positive coordinate (or xi a negative one) under the entropy map

    """
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if geometry.kind is GeometryKind.EUCLIDEAN:
        diff = xi - zeta
        return 0.5 * float(diff @ diff)
    _check_entropy_domain(xi, strict=False)
    _check_entropy_domain(zeta, strict=True)
    return float(np.sum(rel_entr(xi, zeta) - xi + zeta))


def triangle_identity_residual(
    geometry: BregmanGeometry, xi: np.ndarray, zeta: np.ndarray, theta: np.ndarray
) -> float:
    """Return the absolute error of the three-point identity of the divergence.

    The identity reads <xi - zeta, grad phi(zeta) - grad phi(theta)> =
    D(xi, theta) - D(xi, zeta) - D(zeta, theta).
    """
    xi = np.asarray(xi, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    lhs = float((xi - zeta) @ (geometry.potential_gradient(zeta) - geometry.potential_gradient(theta)))
    rhs = divergence(geometry, xi, theta) - divergence(geometry, xi, zeta) - divergence(geometry, zeta, theta)
    return abs(lhs - rhs)


def mirror_step(
    geometry: BregmanGeometry,
    feasible_set: FeasibleSet,
    center: np.ndarray,
    linear_term: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """Solve argmin over the set of alpha <x, d> + D(x, center) in closed form.

    Args:
        geometry: Mirror map of the player
        feasible_set: Feasible set of the player
        center: Current point, inside the set
        linear_term: Combined direction d
        alpha: Positive step size

    Returns:
        The unique minimizer

    Raises:
        NonFiniteInput: If d contains NaN or infinite entries
        GeometrySetMismatch: If the pair has no closed form here

    """
    d = np.asarray(linear_term, dtype=float)
    if not np.all(np.isfinite(d)):
        msg = f"Mirror step direction contains non-finite values: {d}"
        raise NonFiniteInput(msg)
    if alpha <= 0.0:
        msg = f"Mirror step size must be positive, got {alpha}"
        raise ValueError(msg)
    center = np.asarray(center, dtype=float)

    if geometry.kind is GeometryKind.EUCLIDEAN:
        if feasible_set.kind is SetKind.BOX:
            return np.clip(center - alpha * d, feasible_set.lower, feasible_set.upper)
        return project_simplex(center - alpha * d)

    if feasible_set.kind is SetKind.SIMPLEX:
        # Floor the center so zero coordinates do not become absorbing
        floored = np.maximum(center, SIMPLEX_FLOOR)
        return softmax(np.log(floored) - alpha * d)

    msg = f"No closed-form mirror step for {geometry.kind} geometry on a {feasible_set.kind} set"
    raise GeometrySetMismatch(msg)


def lipschitz_constant(
    kind: GeometryKind,
    feasible_set: FeasibleSet,
    *,
    rng: np.random.Generator | None = None,
    samples: int = ENTROPY_LIPSCHITZ_SAMPLES,
) -> float:
    """Return the Lipschitz constant K of D(., zeta) over the feasible set.

    Euclidean geometry uses the set diameter. The entropy map on the simplex is not
    globally Lipschitz, so K is the largest sampled difference quotient on the floored
    domain, inflated by a safety factor.
    """
    if kind is GeometryKind.EUCLIDEAN:
        return max(feasible_set.diameter, np.finfo(float).tiny)
    if feasible_set.kind is not SetKind.SIMPLEX:
        msg = f"No Lipschitz estimate for {kind} geometry on a {feasible_set.kind} set"
        raise GeometrySetMismatch(msg)

    rng = rng if rng is not None else np.random.default_rng(0)
    first = feasible_set.sample(rng, samples)
    second = feasible_set.sample(rng, samples)
    anchor = np.maximum(feasible_set.sample(rng, samples), SIMPLEX_FLOOR)

    def _kl(x: np.ndarray) -> np.ndarray:
        return np.sum(rel_entr(x, anchor) - x + anchor, axis=1)

    gaps = np.linalg.norm(first - second, axis=1)
    mask = gaps > 0.0
    quotients = np.abs(_kl(first) - _kl(second))[mask] / gaps[mask]
    estimate = ENTROPY_LIPSCHITZ_INFLATION * float(np.max(quotients, initial=0.0))
    _LOGGER.debug("Sampled entropy Lipschitz constant %.4f over %d pairs", estimate, samples)
    return estimate


def make_geometry(
    kind: GeometryKind | str,
    feasible_set: FeasibleSet,
    *,
    rng: np.random.Generator | None = None,
) -> BregmanGeometry:
    """Build the geometry for one player, checking that the pair is supported."""
    kind = GeometryKind(kind)
    if kind is GeometryKind.ENTROPY and feasible_set.kind is not SetKind.SIMPLEX:
        msg = f"Entropy geometry requires a simplex feasible set, got {feasible_set.kind}"
        raise GeometrySetMismatch(msg)
    return BregmanGeometry(
        kind=kind,
        dimension=feasible_set.dimension,
        strong_convexity=1.0,
        lipschitz_K=lipschitz_constant(kind, feasible_set, rng=rng),
    )


def make_geometries(
    kind: GeometryKind | str,
    feasible_sets: Sequence[FeasibleSet],
    *,
    rng: np.random.Generator | None = None,
) -> list[BregmanGeometry]:
    """Build one geometry per player, sharing the estimate between identical simplices."""
    kind = GeometryKind(kind)
    shared: dict[int, BregmanGeometry] = {}
    geometries = []
    for feasible_set in feasible_sets:
        if feasible_set.kind is SetKind.SIMPLEX:
            if feasible_set.dimension not in shared:
                shared[feasible_set.dimension] = make_geometry(kind, feasible_set, rng=rng)
            geometries.append(shared[feasible_set.dimension])
        else:
            geometries.append(make_geometry(kind, feasible_set, rng=rng))
    return geometries
