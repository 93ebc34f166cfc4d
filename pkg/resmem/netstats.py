"""
Graph statistics of the adjacency matrix.

Two nodes are neighbors when A_ij or A_ji is nonzero. Path lengths follow the hop-minimal
breadth-first paths; the weighted length of a path is the sum of
delta_ij = ln(1 / (|A_ij| + |A_ji|)) over its hops, assigned when a node is first visited.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy import optimize

from resmem.core.exceptions import (
    CalibrationFailedError,
    EmptyGraphError,
    InvalidInputError,
    NotAdjacentError,
)
from resmem.reservoir import AdjacencyMatrix

logger = logging.getLogger(__name__)

RHO_BRACKET = (1e-4, 1e4)


@dataclass(frozen=True)
class PathLengthReport:
    """Pooled means over all finite off-diagonal pairs."""

    mean_unweighted: float
    mean_weighted: float
    unreachable_pairs: int
    reachable_pairs: int


class DelayCoefficients(NamedTuple):
    """Node-averaged |b_j| for j = 1 .. n and the per-node vectors b_j."""

    means: np.ndarray
    vectors: np.ndarray


def _neighbors(A: AdjacencyMatrix) -> List[np.ndarray]:
    linked = A.mask | A.mask.T
    return [np.flatnonzero(row) for row in linked]


def _coupling(A: AdjacencyMatrix) -> np.ndarray:
    magnitude = np.abs(A.entries)
    return magnitude + magnitude.T


def _traverse(
    neighbors: List[np.ndarray], coupling: np.ndarray, i0: int
) -> Tuple[np.ndarray, np.ndarray]:
    M = len(neighbors)
    hops = np.full(M, np.inf)
    weighted = np.full(M, np.inf)
    hops[i0] = 0.0
    weighted[i0] = 0.0
    queue = deque([i0])
    while queue:
        node = queue.popleft()
        for other in neighbors[node]:
            if hops[other] != np.inf:
                continue
            hops[other] = hops[node] + 1
            weighted[other] = weighted[node] - np.log(coupling[node, other])
            queue.append(other)
    return hops, weighted


def bfs_distances(A: AdjacencyMatrix, i0: int) -> np.ndarray:
    """Hop distances from ``i0``; unreachable nodes are ``inf``."""
    if not 0 <= i0 < A.M:
        raise InvalidInputError(f"node index {i0} outside [0, {A.M})")
    hops, _ = _traverse(_neighbors(A), _coupling(A), i0)
    return hops


def weighted_distance(A: AdjacencyMatrix, i: int, j: int) -> float:
    """
    delta_ij = ln(1 / (|A_ij| + |A_ji|)); negative for strongly coupled pairs.

    Raises:
        NotAdjacentError: If both entries are zero
    """
    total = abs(A.entries[i, j]) + abs(A.entries[j, i])
    if total == 0:
        raise NotAdjacentError(f"nodes {i} and {j} are not adjacent")
    return float(-np.log(total))


def _all_pairs(A: AdjacencyMatrix) -> Tuple[np.ndarray, np.ndarray]:
    neighbors, coupling = _neighbors(A), _coupling(A)
    pairs = [_traverse(neighbors, coupling, i0) for i0 in range(A.M)]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def path_length_report(A: AdjacencyMatrix) -> PathLengthReport:
    """
    Mean hop and weighted path lengths from one BFS per source node.

    Raises:
        EmptyGraphError: If no off-diagonal pair is connected
    """
    hops, weighted = _all_pairs(A)
    off_diagonal = ~np.eye(A.M, dtype=bool)
    reachable = off_diagonal & np.isfinite(hops)
    n_reachable = int(reachable.sum())
    if n_reachable == 0:
        raise EmptyGraphError("no two distinct nodes are connected")
    report = PathLengthReport(
        mean_unweighted=float(hops[reachable].mean()),
        mean_weighted=float(weighted[reachable].mean()),
        unreachable_pairs=int(off_diagonal.sum()) - n_reachable,
        reachable_pairs=n_reachable,
    )
    if report.unreachable_pairs:
        logger.debug("%d node pairs are unreachable", report.unreachable_pairs)
    return report


def mean_unweighted_path_length(A: AdjacencyMatrix) -> float:
    return path_length_report(A).mean_unweighted


def mean_weighted_path_length(A: AdjacencyMatrix) -> float:
    return path_length_report(A).mean_weighted


def calibrate_spectral_radius(A: AdjacencyMatrix, target_LW: float) -> float:
    """
    Spectral radius at which the rescaled ``A`` has mean weighted path length ``target_LW``.

    Rescaling by c leaves the BFS paths unchanged and shifts the weighted mean by
    -<L_U> ln c, so one traversal suffices; the root in ln(rho) is bracketed on
    [1e-4, 1e4].

    Raises:
        CalibrationFailedError: If the target is not reached inside the bracket
    """
    report = path_length_report(A)
    log_rho0 = np.log(A.spectral_radius)

    def residual(log_rho: float) -> float:
        return report.mean_weighted - report.mean_unweighted * (log_rho - log_rho0) - target_LW

    low, high = np.log(RHO_BRACKET[0]), np.log(RHO_BRACKET[1])
    if residual(low) * residual(high) > 0:
        raise CalibrationFailedError(
            f"<L_W> = {target_LW} is not reachable for rho in {RHO_BRACKET}"
        )
    log_rho = optimize.brentq(residual, low, high, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(np.exp(log_rho))


def linear_delay_coefficients(
    A: AdjacencyMatrix, rho: float, n_terms: int = 4
) -> DelayCoefficients:
    """b_1 = rho A W and b_j = rho A b_(j-1) with W all ones."""
    if n_terms < 1:
        raise InvalidInputError("n_terms must be at least 1")
    coupling = rho * A.entries
    b = coupling @ np.ones(A.M)
    vectors = [b]
    for _ in range(n_terms - 1):
        b = coupling @ b
        vectors.append(b)
    stacked = np.array(vectors)
    return DelayCoefficients(np.abs(stacked).mean(axis=1), stacked)
