"""Stress and distance-correlation scores comparing input and embedding distances.

All scores use the strict upper triangle (pairs ``i < j``), so the zero
diagonal never contributes.
"""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from .errors import ConstantDistancesError, ShapeMismatchError
from .types import as_matrix


def _upper_pairs(dx, dy):
    a, b = as_matrix(dx), as_matrix(dy)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"distance matrices differ in shape: {a.shape} vs {b.shape}")
    iu = np.triu_indices(a.shape[0], 1)
    return a[iu], b[iu]


def stress(dx, dy) -> float:
    """``sum_{i<j} (dx_ij - dy_ij)^2``."""
    a, b = _upper_pairs(dx, dy)
    return float(np.sum((a - b) ** 2))


def pearson_distance_correlation(dx, dy) -> float:
    """Pearson correlation between the upper-triangle entries of two matrices.

    Raises
    ------
    ConstantDistancesError
        If either set of distances has zero variance (or n < 3).
    """
    a, b = _upper_pairs(dx, dy)
    if a.size < 3:
        raise ConstantDistancesError("need at least 3 points for a distance correlation")
    a = a - a.mean()
    b = b - b.mean()
    va, vb = np.dot(a, a), np.dot(b, b)
    if va == 0.0 or vb == 0.0:
        raise ConstantDistancesError("distances are constant; correlation is undefined")
    return float(np.dot(a, b) / np.sqrt(va * vb))


def distance_scatter(dx, dy) -> List[Tuple[float, float]]:
    """``(dx_ij, dy_ij)`` for ``i < j`` in row-major order."""
    a, b = _upper_pairs(dx, dy)
    return list(zip(a.tolist(), b.tolist()))
