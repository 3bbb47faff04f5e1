"""k-nearest-neighbour graphs and shortest-path (geodesic) distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DataError, DisconnectedGraphError, KTooLargeError
from .types import DistanceMatrix, as_matrix

# Duplicate points would give zero-weight edges, which sparse graph code
# reads as "no edge"; this floor keeps them as real, positive edges.
MIN_EDGE_WEIGHT = 1e-12


@dataclass(frozen=True, eq=False)
class NeighborGraph:
    """Undirected weighted graph stored as a symmetric edge list.

    ``rows[e] -> cols[e]`` has weight ``weights[e]``; every edge appears in
    both directions, sorted by ``(row, col)``.
    """

    n: int
    k: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.rows == self.cols):
            raise DataError("self-loops are not allowed")
        if np.any(~np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise DataError("edge weights must be positive and finite")
        fwd = set(zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()))
        if any((j, i, w) not in fwd for i, j, w in fwd):
            raise DataError("edge list is not symmetric")

    @property
    def edges(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.weights.tolist()))

    def neighbors(self, i: int) -> np.ndarray:
        return self.cols[self.rows == i]

    def to_csr(self) -> csr_matrix:
        return csr_matrix((self.weights, (self.rows, self.cols)), shape=(self.n, self.n))


def knn_graph(dist, k: int) -> NeighborGraph:
    """Connect every node to its ``k`` nearest neighbours, then symmetrise by union.

    Ties are broken towards the lower index. Zero distances (duplicate
    points) become edges of weight ``MIN_EDGE_WEIGHT``.
    """
    d = np.array(as_matrix(dist), dtype=np.float64)
    n = d.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= n:
        raise KTooLargeError(f"k={k} must be smaller than the number of points n={n}")
    np.fill_diagonal(d, np.inf)
    nearest = np.argsort(d, axis=1, kind="stable")[:, :k]
    src = np.repeat(np.arange(n), k)
    dst = nearest.ravel()
    w = np.zeros((n, n))
    w[src, dst] = np.maximum(d[src, dst], MIN_EDGE_WEIGHT)
    w = np.maximum(w, w.T)
    rows, cols = np.nonzero(w)
    return NeighborGraph(n=n, k=k, rows=rows, cols=cols, weights=w[rows, cols])


def geodesic_distances(graph: NeighborGraph) -> DistanceMatrix:
    """All-pairs shortest path lengths (Dijkstra from every source).

    Raises
    ------
    DisconnectedGraphError
        If the graph has more than one component.
    """
    adj = graph.to_csr()
    n_comp, labels = connected_components(adj, directed=False)
    if n_comp > 1:
        raise DisconnectedGraphError(np.bincount(labels))
    g = dijkstra(adj, directed=False)
    # both triangles hold genuine path lengths; taking the min makes the
    # result exactly symmetric without averaging
    g = np.minimum(g, g.T)
    np.fill_diagonal(g, 0.0)
    return DistanceMatrix(g)


def geodesic_from_points(dist, k: int) -> DistanceMatrix:
    return geodesic_distances(knn_graph(dist, k))
