"""Pairwise Euclidean distances and per-feature normalisation."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .types import DistanceMatrix, PointCloud, as_matrix

NORMALIZATIONS = ("none", "minmax", "zscore", "pixelmax")


def pairwise_euclidean(cloud) -> DistanceMatrix:
    """Matrix of l2 distances between the rows of ``cloud``.

    Each unordered pair is evaluated once from the coordinate differences,
    so the result is exactly symmetric and duplicated rows give exactly 0.
    """
    pts = as_matrix(cloud)
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, p) array, got shape {pts.shape}")
    if pts.shape[0] == 1:
        return DistanceMatrix(np.zeros((1, 1)))
    return DistanceMatrix(squareform(pdist(pts, metric="euclidean")))


def normalize_features(cloud: PointCloud, mode: str = "minmax", pixel_max: float = 255.0) -> PointCloud:
    """Rescale the columns of ``cloud``.

    Parameters
    ----------
    cloud : PointCloud
    mode : {'minmax', 'zscore', 'pixelmax', 'none'}
        ``minmax`` maps every column onto [0, 1], ``zscore`` to mean 0 and
        (population) standard deviation 1, ``pixelmax`` divides everything
        by ``pixel_max``. Constant columns become all-zero under ``minmax``
        and ``zscore`` instead of raising.
    pixel_max : float
        Divisor used by ``pixelmax``.
    """
    x = np.array(as_matrix(cloud), dtype=np.float64)
    if mode == "none":
        return PointCloud(x)
    if mode == "pixelmax":
        if not pixel_max > 0:
            raise ValueError("pixel_max must be positive")
        return PointCloud(x / pixel_max)
    if mode == "minmax":
        lo = x.min(axis=0)
        span = x.max(axis=0) - lo
        out = np.zeros_like(x)
        ok = span > 0
        out[:, ok] = (x[:, ok] - lo[ok]) / span[ok]
        # guard against 1 + ulp after the division
        return PointCloud(np.clip(out, 0.0, 1.0))
    if mode == "zscore":
        mu = x.mean(axis=0)
        sd = x.std(axis=0)
        out = np.zeros_like(x)
        ok = sd > 0
        out[:, ok] = (x[:, ok] - mu[ok]) / sd[ok]
        return PointCloud(out)
    raise ValueError(f"unknown normalisation {mode!r}; expected one of {NORMALIZATIONS}")
