"""Gromov-Wasserstein multidimensional scaling.

The embedding ``Y`` is found by block alternation: with ``Y`` fixed the GW
coupling between the input distances and the distances of ``Y`` is solved
(warm-started from the previous coupling), then with the coupling fixed
``Y`` takes one plain gradient step on the GW cost. A final barycentric
projection through the last coupling puts the points back in input order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import baselines
from .config import ExperimentConfig
from .errors import DimTooLargeError, DivergenceError, ShapeMismatchError
from .geodesics import geodesic_distances, knn_graph
from .metrics import pairwise_euclidean
from .ot import FW_MAX_ITERS, FW_TOL, solve_gw
from .types import Coupling, DistanceMatrix, Embedding, PointCloud, as_matrix

log = logging.getLogger(__name__)

DIST_EPS = 1e-12
STOP_WINDOW = 10
DIVERGENCE_FACTOR = 10.0


@dataclass(frozen=True)
class GwMdsState:
    """Snapshot handed to the per-iteration callback."""

    iteration: int
    coords: np.ndarray
    plan: Coupling
    cost: float
    grad_norm: float


def init_embedding(cloud, d: int, strategy: str = "pca", seed: int = 0) -> np.ndarray:
    """Starting coordinates: i.i.d. N(0, 1) entries or the top-``d`` PCA scores."""
    x = as_matrix(cloud)
    n, p = x.shape
    if d < 1 or d > p:
        raise DimTooLargeError(f"target dimension {d} must lie in [1, {p}]")
    if strategy == "randn":
        return np.random.default_rng(seed).standard_normal((n, d))
    if strategy == "pca":
        return np.array(baselines.pca(x, d).coords)
    raise ValueError(f"unknown init strategy {strategy!r}")


def gw_gradient_coords(cost_x, coords, plan, cost_y=None) -> np.ndarray:
    """Gradient of the GW cost with respect to the embedding, plan held fixed.

    With ``G = dF/dCY = 2 (CY * b b^T - P^T CX P)`` (``b`` the column
    marginal), the chain rule through ``CY[k, l] = |y_k - y_l|`` gives
    ``dF/dy_k = sum_l (G[k, l] + G[l, k]) (y_k - y_l) / CY[k, l]``.
    Coincident points contribute nothing.
    """
    cx = as_matrix(cost_x)
    y = as_matrix(coords)
    p = as_matrix(plan)
    n = y.shape[0]
    if cx.shape != (p.shape[0], p.shape[0]) or p.shape[1] != n:
        raise ShapeMismatchError("cost_x, plan and coords have inconsistent sizes")
    cy = as_matrix(pairwise_euclidean(y)) if cost_y is None else as_matrix(cost_y)
    b = p.sum(axis=0)
    g = 2.0 * (cy * np.outer(b, b) - p.T @ cx @ p)
    w = (g + g.T) / np.maximum(cy, DIST_EPS)
    np.fill_diagonal(w, 0.0)
    return w.sum(axis=1)[:, None] * y - w @ y


def align_embedding(coords, plan) -> np.ndarray:
    """Barycentric projection ``Y'_i = sum_j P[i, j] Y_j / a_i``.

    For uniform marginals this is ``n * P @ Y``; a permutation plan simply
    reorders the rows.
    """
    y = as_matrix(coords)
    p = as_matrix(plan)
    if p.shape[1] != y.shape[0]:
        raise ShapeMismatchError(f"plan shape {p.shape} does not match {y.shape[0]} points")
    return (p @ y) / p.sum(axis=1)[:, None]


def gw_mds(cost_x, init_coords, learning_rate: float = 0.1, max_iter: int = 500,
           tol: float = 1e-7, fw_max_iter: int = FW_MAX_ITERS, fw_tol: float = FW_TOL,
           callback: Optional[Callable[[GwMdsState], None]] = None) -> Embedding:
    """Run the alternating GW / gradient-descent loop on a distance matrix.

    Parameters
    ----------
    cost_x : (n, n) DistanceMatrix or array
        Input-space distances (Euclidean or geodesic).
    init_coords : (n, d) array
        Starting embedding ``Y_0``. Row ``i`` is taken to represent point
        ``i``, so the first coupling solve starts from the identity plan.
    learning_rate : float
        Step size applied to the per-point gradient, i.e. the gradient of
        the GW cost divided by the point mass ``1/n``. This keeps the
        meaning of the rate independent of ``n``.
    max_iter : int
        Maximum number of outer iterations.
    tol : float
        Stop once the cost decreased by less than ``tol`` (relative) over
        the last ``STOP_WINDOW`` iterations.
    fw_max_iter, fw_tol
        Passed to :func:`gwembed.ot.solve_gw`.
    callback : callable, optional
        Called with a :class:`GwMdsState` after each coupling solve.

    Returns
    -------
    Embedding
        Aligned coordinates, the ``(iteration, cost)`` trace and the final
        coupling. ``info['raw_coords']`` holds the unaligned coordinates.

    Raises
    ------
    DivergenceError
        If the cost exceeds ten times its best value so far, or the
        coordinates stop being finite.
    """
    cx = as_matrix(cost_x)
    y = np.array(as_matrix(init_coords), dtype=np.float64)
    n = cx.shape[0]
    if y.ndim != 2 or y.shape[0] != n:
        raise ShapeMismatchError(f"init coords must have {n} rows, got shape {y.shape}")
    if not learning_rate > 0:
        raise ValueError("learning_rate must be positive")
    step = learning_rate * n
    # guards the divergence test when the best cost is ~0
    floor = 1e-12 * float(np.mean(cx * cx)) + np.finfo(float).tiny

    plan = Coupling.identity(n)
    trace = []
    best = np.inf
    converged = False
    fw_total = 0
    for it in range(max_iter + 1):
        cy = as_matrix(pairwise_euclidean(y))
        res = solve_gw(cx, cy, fw_max_iter, fw_tol, init_plan=plan)
        plan, cost = res.plan, res.cost
        fw_total += res.fw_iterations
        trace.append((it, cost))
        if cost > DIVERGENCE_FACTOR * best and cost > floor:
            raise DivergenceError(
                f"GW cost rose to {cost:.4g} (best {best:.4g}) at iteration {it}; "
                "lower the learning rate")
        best = min(best, cost)
        if len(trace) > STOP_WINDOW:
            ref = trace[-1 - STOP_WINDOW][1]
            if ref - cost <= tol * ref:
                converged = True
        if cost == 0.0:
            converged = True
        if converged or it == max_iter:
            if callback is not None:
                callback(GwMdsState(it, y.copy(), plan, cost, 0.0))
            break
        grad = gw_gradient_coords(cx, y, plan, cost_y=cy)
        if callback is not None:
            callback(GwMdsState(it, y.copy(), plan, cost, float(np.linalg.norm(grad))))
        y = y - step * grad
        if not np.all(np.isfinite(y)):
            raise DivergenceError(f"non-finite coordinates at iteration {it}; lower the learning rate")

    log.debug("gw-mds stopped after %d iterations (converged=%s, cost=%.6g)", it, converged, cost)
    aligned = align_embedding(y, plan)
    info = {"iterations": it, "converged": converged, "fw_iterations": fw_total,
            "raw_coords": y}
    return Embedding(aligned, loss_trace=trace, final_plan=plan, info=info)


def input_distances(cloud, metric: str = "euclidean", k: int = 10) -> DistanceMatrix:
    """Input-space ground metric: Euclidean, or geodesic over a k-NN graph."""
    dx = pairwise_euclidean(cloud)
    if metric == "euclidean":
        return dx
    if metric == "geodesic":
        return geodesic_distances(knn_graph(dx, k))
    raise ValueError(f"unknown metric {metric!r}")


def run_gw_mds(cloud: PointCloud, config: ExperimentConfig,
               callback: Optional[Callable[[GwMdsState], None]] = None) -> Embedding:
    """Full pipeline for one configuration: ground metric, init, loop, alignment."""
    cx = input_distances(cloud, config.metric, config.k)
    y0 = init_embedding(cloud, config.target_dim, config.init, config.seed)
    emb = gw_mds(cx, y0, learning_rate=config.learning_rate, max_iter=config.max_outer_iters,
                 tol=config.convergence_tol, fw_max_iter=config.fw_max_iters,
                 fw_tol=config.fw_tol, callback=callback)
    return Embedding(emb.coords, emb.loss_trace, emb.final_plan,
                     info={**emb.info, "cost_x": cx})
