"""Communication topologies and their doubly stochastic weight matrices."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
import logging

import networkx as nx
import numpy as np

from .const import (
    EIGEN_TOL,
    GRAPH_KIND_COMPLETE,
    GRAPH_KIND_EDGES,
    GRAPH_KIND_PATH,
    GRAPH_KIND_RING,
    ROW_SUM_TOL,
)
from .exceptions import DegenerateSpectrum, DisconnectedGraph, InvalidEdge, NumericalFailure, ValidationError

_LOGGER = logging.getLogger(__name__)

MIN_PLAYERS = 2


@dataclass(frozen=True)
class GraphTopology:
    """Undirected connected graph with a symmetric doubly stochastic weight matrix.

    Attributes:
        weights: N x N weight matrix A (read only)
        sigma: Largest spectral radius over the principal submatrices with one row/column deleted
        sigma_m: Largest eigenvalue of A - 11^T/N

    """

    weights: np.ndarray
    sigma: float
    sigma_m: float

    @property
    def n_players(self) -> int:
        """Return the number of players N."""
        return int(self.weights.shape[0])

    def neighbors(self, i: int) -> list[int]:
        """Return the neighbors of player i (0-based), excluding i itself."""
        return [int(j) for j in np.flatnonzero(self.weights[i]) if j != i]

    def mix(self, values: np.ndarray) -> np.ndarray:
        """Return the weighted averages A @ values along the first axis."""
        return self.weights @ values


def _check_players(n_players: int) -> None:
    if n_players < MIN_PLAYERS:
        msg = f"A communication graph needs at least {MIN_PLAYERS} players, got {n_players}"
        raise ValidationError(msg)


def ring_edges(n_players: int) -> list[tuple[int, int]]:
    """Return the edges of a ring over 0-based vertices."""
    _check_players(n_players)
    return [(int(u), int(v)) for u, v in nx.cycle_graph(n_players).edges()]


def path_edges(n_players: int) -> list[tuple[int, int]]:
    """Return the edges of a path over 0-based vertices."""
    _check_players(n_players)
    return [(int(u), int(v)) for u, v in nx.path_graph(n_players).edges()]


def complete_edges(n_players: int) -> list[tuple[int, int]]:
    """Return the edges of a complete graph over 0-based vertices."""
    _check_players(n_players)
    return [(int(u), int(v)) for u, v in nx.complete_graph(n_players).edges()]


def _build_nx_graph(n_players: int, edges: Iterable[Sequence[int]]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(n_players))
    for edge in edges:
        if len(edge) != 2:  # noqa: PLR2004 an edge has two endpoints
            msg = f"Edge {edge!r} must have exactly two endpoints"
            raise InvalidEdge(msg)
        u, v = int(edge[0]), int(edge[1])
        if u == v:
            msg = f"Self-loop on vertex {u} is not allowed"
            raise InvalidEdge(msg)
        if not (0 <= u < n_players and 0 <= v < n_players):
            msg = f"Edge ({u}, {v}) references a vertex outside [0, {n_players - 1}]"
            raise InvalidEdge(msg)
        graph.add_edge(u, v)
    return graph


def build_metropolis(n_players: int, edges: Iterable[Sequence[int]], *, laziness: float = 0.0) -> GraphTopology:
    """Build Metropolis-Hastings weights for an undirected graph.

    a_ij = 1 / (1 + max(deg_i, deg_j)) on edges and a_ii = 1 - sum_j a_ij. With a
    non-zero laziness theta the matrix becomes (1 - theta) A + theta I, which keeps
    every invariant and lifts the degenerate spectrum of complete graphs.

    Args:
        n_players: Number of players N
        edges: Undirected edges over 0-based vertices; duplicates are ignored
        laziness: Extra self weight theta in [0, 1)

    Returns:
        A validated topology with its spectral constants

    Raises:
        InvalidEdge: On self-loops or out of range vertices
        DisconnectedGraph: If the edges do not connect all players
        DegenerateSpectrum: If sigma or sigma_m is not strictly inside (0, 1)

    """
    _check_players(n_players)
    if not 0.0 <= laziness < 1.0:
        msg = f"laziness must lie in [0, 1), got {laziness}"
        raise ValidationError(msg)

    graph = _build_nx_graph(n_players, edges)
    if not nx.is_connected(graph):
        msg = f"Graph with {n_players} players and {graph.number_of_edges()} edges is not connected"
        raise DisconnectedGraph(msg)

    weights = np.zeros((n_players, n_players))
    degree = dict(graph.degree())
    for u, v in graph.edges():
        # Assign both entries from one value so the matrix is exactly symmetric
        weight = 1.0 / (1.0 + max(degree[u], degree[v]))
        weights[u, v] = weight
        weights[v, u] = weight
    np.fill_diagonal(weights, 1.0 - weights.sum(axis=1))

    if laziness > 0.0:
        weights = (1.0 - laziness) * weights + laziness * np.eye(n_players)

    return from_weights(weights)


def validate_weights(weights: np.ndarray) -> None:
    """Check that a weight matrix satisfies the topology assumptions.

    Raises:
        ValidationError: If the matrix is not square, finite, symmetric, stochastic or has a non-positive diagonal
        DisconnectedGraph: If the nonzero off-diagonal pattern is not connected

    """
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:  # noqa: PLR2004 matrices are 2-D
        msg = f"Weight matrix must be square, got shape {weights.shape}"
        raise ValidationError(msg)
    _check_players(weights.shape[0])
    if not np.all(np.isfinite(weights)):
        msg = "Weight matrix contains non-finite entries"
        raise ValidationError(msg)
    if not np.array_equal(weights, weights.T):
        msg = "Weight matrix must be exactly symmetric"
        raise ValidationError(msg)
    row_error = float(np.max(np.abs(weights.sum(axis=1) - 1.0)))
    if row_error > ROW_SUM_TOL:
        msg = f"Weight matrix rows must sum to 1 (max deviation {row_error:.3e})"
        raise ValidationError(msg)
    if np.any(weights < 0.0):
        msg = "Weight matrix entries must be non-negative"
        raise ValidationError(msg)
    if np.any(np.diag(weights) <= 0.0):
        msg = "Weight matrix diagonal entries must be positive"
        raise ValidationError(msg)

    pattern = weights.copy()
    np.fill_diagonal(pattern, 0.0)
    if not nx.is_connected(nx.from_numpy_array(pattern)):
        msg = "Weight matrix does not induce a connected graph"
        raise DisconnectedGraph(msg)


def _symmetric_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Return the eigenvalues of a symmetric matrix after checking the decomposition residual."""
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as ex:
        msg = "Symmetric eigensolver did not converge"
        raise NumericalFailure(msg) from ex

    residual = float(np.max(np.abs(matrix @ vectors - vectors * values), initial=0.0))
    if not np.isfinite(residual) or residual > EIGEN_TOL * max(1.0, float(np.max(np.abs(matrix), initial=0.0))):
        msg = f"Eigendecomposition residual {residual:.3e} exceeds tolerance {EIGEN_TOL:.0e}"
        raise NumericalFailure(msg)
    return values


def spectral_params(weights: np.ndarray) -> tuple[float, float]:
    """Compute the spectral constants sigma and sigma_m of a weight matrix.

    Args:
        weights: Symmetric doubly stochastic weight matrix

    Returns:
        Tuple of (sigma, sigma_m)

    Raises:
        NumericalFailure: If an eigendecomposition fails its residual check
        DegenerateSpectrum: If either constant is not strictly inside (0, 1)

    """
    n = weights.shape[0]
    sigma = 0.0
    for i in range(n):
        reduced = np.delete(np.delete(weights, i, axis=0), i, axis=1)
        sigma = max(sigma, float(np.max(np.abs(_symmetric_eigenvalues(reduced)))))

    sigma_m = float(np.max(_symmetric_eigenvalues(weights - np.ones((n, n)) / n)))

    for name, value in (("sigma", sigma), ("sigma_m", sigma_m)):
        if not EIGEN_TOL < value < 1.0 - EIGEN_TOL:
            msg = f"{name} = {value:.6g} is not strictly inside (0, 1)"
            raise DegenerateSpectrum(msg)

    _LOGGER.debug("Spectral constants for %d players: sigma=%.6f sigma_m=%.6f", n, sigma, sigma_m)
    return sigma, sigma_m


def from_weights(weights: np.ndarray | Sequence[Sequence[float]]) -> GraphTopology:
    """Build a topology from an explicit weight matrix after validating it."""
    matrix = np.array(weights, dtype=float)
    validate_weights(matrix)
    sigma, sigma_m = spectral_params(matrix)
    matrix.flags.writeable = False
    return GraphTopology(weights=matrix, sigma=sigma, sigma_m=sigma_m)


def build_topology(
    kind: str,
    n_players: int,
    *,
    edges: Iterable[Sequence[int]] | None = None,
    laziness: float = 0.0,
) -> GraphTopology:
    """Build a Metropolis topology of the named kind.

    Args:
        kind: One of ring, path, complete or edges
        n_players: Number of players N
        edges: Explicit 0-based edges, required for the edges kind
        laziness: Extra self weight, see build_metropolis

    """
    generators = {
        GRAPH_KIND_RING: ring_edges,
        GRAPH_KIND_PATH: path_edges,
        GRAPH_KIND_COMPLETE: complete_edges,
    }
    if kind == GRAPH_KIND_EDGES:
        if edges is None:
            msg = "Explicit edges are required for graph kind 'edges'"
            raise ValidationError(msg)
        return build_metropolis(n_players, edges, laziness=laziness)
    if kind not in generators:
        msg = f"Unknown graph kind: {kind}"
        raise ValidationError(msg)
    return build_metropolis(n_players, generators[kind](n_players), laziness=laziness)
