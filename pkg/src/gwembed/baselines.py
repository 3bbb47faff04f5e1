"""Reference embeddings: PCA, metric MDS (SMACOF), classical MDS and Isomap."""

from __future__ import annotations

import numpy as np

from .errors import DimTooLargeError
from .geodesics import geodesic_distances, knn_graph
from .metrics import pairwise_euclidean
from .types import Embedding, as_matrix

MDS_MAX_ITERS = 300


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _top_eigh(sym: np.ndarray, d: int):
    vals, vecs = np.linalg.eigh(sym)
    order = np.argsort(vals, kind="stable")[::-1][:d]
    return vals[order], vecs[:, order]


def pca(cloud, d: int) -> Embedding:
    """Project centred data onto its ``d`` leading principal axes.

    Uses the ``p x p`` covariance when ``p <= n`` and the ``n x n`` Gram
    matrix otherwise. Components come in decreasing variance order, and
    each loading vector has its largest-magnitude entry made positive.

    ``info`` carries ``explained_variance`` (the top ``d`` eigenvalues of
    the population covariance), ``total_variance`` and ``components``.
    """
    x = as_matrix(cloud)
    n, p = x.shape
    if d < 1 or d > min(n, p):
        raise DimTooLargeError(f"d={d} must lie in [1, min(n, p)={min(n, p)}]")
    xc = x - x.mean(axis=0)
    if p <= n:
        vals, comps = _top_eigh(xc.T @ xc / n, d)
    else:
        vals, u = _top_eigh(xc @ xc.T / n, d)
        comps = xc.T @ u
        norms = np.linalg.norm(comps, axis=0)
        # directions with no variance (d beyond the rank) are pure round-off
        live = norms > 1e-10 * max(float(norms.max()), np.finfo(float).tiny)
        comps = np.where(live, comps / np.where(live, norms, 1.0), 0.0)
    comps = _fix_signs(comps)
    coords = xc @ comps
    info = {
        "explained_variance": np.maximum(vals, 0.0),
        "total_variance": float(np.sum(xc * xc) / n),
        "components": comps,
    }
    return Embedding(coords, info=info)


def _stress(delta: np.ndarray, y: np.ndarray) -> float:
    iu = np.triu_indices(len(delta), 1)
    dy = as_matrix(pairwise_euclidean(y))
    return float(np.sum((delta[iu] - dy[iu]) ** 2))


def metric_mds(dist, d: int, max_iter: int = MDS_MAX_ITERS, seed: int = 0,
               tol: float = 1e-10, init=None) -> Embedding:
    """Metric MDS by SMACOF (Guttman transform iterations).

    Minimises the raw stress ``sum_{i<j} (dist_ij - |y_i - y_j|)^2`` from a
    seeded standard-normal start (or ``init``). The majorisation step never
    increases stress; iteration stops after ``max_iter`` updates or once
    the relative decrease falls below ``tol``.
    """
    delta = as_matrix(dist)
    n = delta.shape[0]
    if d < 1:
        raise DimTooLargeError("d must be >= 1")
    if init is None:
        y = np.random.default_rng(seed).standard_normal((n, d))
    else:
        y = np.array(as_matrix(init))
    s = _stress(delta, y)
    trace = [(0, s)]
    for it in range(1, max_iter + 1):
        dy = as_matrix(pairwise_euclidean(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dy > 0, delta / dy, 0.0)
        b = -ratio
        np.fill_diagonal(b, 0.0)
        np.fill_diagonal(b, -b.sum(axis=1))
        y = b @ y / n
        s_new = _stress(delta, y)
        trace.append((it, s_new))
        done = s - s_new <= tol * s
        s = s_new
        if done:
            break
    return Embedding(y, loss_trace=trace, info={"stress": s})


def classical_mds(dist, d: int) -> Embedding:
    """Torgerson scaling: eigen-embed ``B = -1/2 J D^2 J``.

    Negative eigenvalues (non-Euclidean input such as geodesic distances)
    are clamped to zero, which yields zero coordinates on those axes.
    """
    delta = as_matrix(dist)
    n = delta.shape[0]
    if d < 1:
        raise DimTooLargeError("d must be >= 1")
    if d > n:
        raise DimTooLargeError(f"d={d} exceeds the number of points {n}")
    sq = delta ** 2
    # J D^2 J without forming J
    b = sq - sq.mean(axis=0)[None, :] - sq.mean(axis=1)[:, None] + sq.mean()
    b = -0.5 * (b + b.T) / 2.0
    vals, vecs = _top_eigh(b, d)
    vals = np.maximum(vals, 0.0)
    vecs = _fix_signs(vecs)
    return Embedding(vecs * np.sqrt(vals), info={"eigenvalues": vals})


def isomap(cloud, d: int, k: int = 10) -> Embedding:
    """k-NN graph, then shortest-path distances, then classical MDS."""
    geo = geodesic_distances(knn_graph(pairwise_euclidean(cloud), k))
    emb = classical_mds(geo, d)
    return Embedding(emb.coords, info={**emb.info, "geodesic": geo})
