"""Validated value types shared across the package.

Every type stores read-only float64 arrays and checks its invariants on
construction, so an instance that exists is an instance that is valid.
All of them implement ``__array__`` and can be handed to numpy directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    AsymmetryError,
    DataError,
    MarginalError,
    NegativeEntryError,
    NonFiniteError,
    NonSquareError,
    ShapeMismatchError,
)

SYMMETRY_TOL = 1e-12
ASYMMETRY_REPAIR_TOL = 1e-9
MASS_TOL = 1e-9


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise ShapeMismatchError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


class _ArrayLike:
    _array_attr: str

    def __array__(self, dtype=None, copy=None):
        arr = getattr(self, self._array_attr)
        return arr if dtype is None else arr.astype(dtype)


@dataclass(frozen=True, eq=False)
class PointCloud(_ArrayLike):
    """An ``(n, p)`` matrix of samples, one row per point."""

    points: np.ndarray
    _array_attr = "points"

    def __post_init__(self):
        pts = _frozen(self.points, 2, "points")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ShapeMismatchError(f"point cloud needs n >= 1 and p >= 1, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteError("point cloud contains non-finite entries")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class DistanceMatrix(_ArrayLike):
    """Symmetric, nonnegative ``(n, n)`` matrix with a zero diagonal.

    Use :func:`validate_distance_matrix` to build one from slightly
    asymmetric input; the constructor itself only checks.
    """

    values: np.ndarray
    _array_attr = "values"

    def __post_init__(self):
        v = _frozen(self.values, 2, "distance matrix")
        _check_square(v)
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("distance matrix contains non-finite entries")
        if np.any(v < 0):
            raise NegativeEntryError("distance matrix contains negative entries")
        if np.any(np.diag(v) != 0):
            raise DataError("distance matrix must have a zero diagonal")
        if np.any(np.abs(v - v.T) > SYMMETRY_TOL * np.maximum(1.0, v)):
            raise AsymmetryError("distance matrix is not symmetric")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {m.shape}")


def validate_distance_matrix(m) -> DistanceMatrix:
    """Validate a raw square matrix and repair round-off asymmetry.

    The diagonal is set to exactly zero and the matrix is replaced by
    ``(m + m.T) / 2``. Asymmetry larger than ``1e-9 * max(1, |m_ij|)`` is
    treated as a genuine error rather than noise.

    Raises
    ------
    NonSquareError, NonFiniteError, NegativeEntryError, AsymmetryError
    """
    if isinstance(m, DistanceMatrix):
        return m
    arr = np.array(m, dtype=np.float64, copy=True)
    _check_square(arr)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("distance matrix contains non-finite entries")
    if np.any(arr < 0):
        raise NegativeEntryError("distance matrix contains negative entries")
    gap = np.abs(arr - arr.T)
    if np.any(gap > ASYMMETRY_REPAIR_TOL * np.maximum(1.0, np.abs(arr))):
        raise AsymmetryError(f"asymmetry {gap.max():.3g} exceeds tolerance")
    arr = (arr + arr.T) / 2.0
    np.fill_diagonal(arr, 0.0)
    return DistanceMatrix(arr)


@dataclass(frozen=True, eq=False)
class Coupling(_ArrayLike):
    """Transport plan with explicit marginals.

    ``row_mass`` and ``col_mass`` default to the actual row/column sums of
    ``plan``; passing them explicitly makes the constructor check the plan
    against them.
    """

    plan: np.ndarray
    row_mass: Optional[np.ndarray] = None
    col_mass: Optional[np.ndarray] = None
    _array_attr = "plan"

    def __post_init__(self):
        plan = _frozen(self.plan, 2, "plan")
        if not np.all(np.isfinite(plan)):
            raise NonFiniteError("plan contains non-finite entries")
        if np.any(plan < 0):
            raise NegativeEntryError("plan contains negative entries")
        rows = plan.sum(axis=1)
        cols = plan.sum(axis=0)
        a = rows if self.row_mass is None else _frozen(self.row_mass, 1, "row_mass")
        b = cols if self.col_mass is None else _frozen(self.col_mass, 1, "col_mass")
        if a.shape != (plan.shape[0],) or b.shape != (plan.shape[1],):
            raise ShapeMismatchError("marginal lengths do not match plan shape")
        if np.any(np.abs(rows - a) > MASS_TOL) or np.any(np.abs(cols - b) > MASS_TOL):
            raise MarginalError("plan marginals do not match the prescribed masses")
        if abs(plan.sum() - 1.0) > MASS_TOL:
            raise MarginalError(f"plan total mass {plan.sum():.12g} != 1")
        if a is rows:
            a = rows.copy()
            a.flags.writeable = False
        if b is cols:
            b = cols.copy()
            b.flags.writeable = False
        object.__setattr__(self, "plan", plan)
        object.__setattr__(self, "row_mass", a)
        object.__setattr__(self, "col_mass", b)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.plan.shape

    @classmethod
    def product(cls, n: int, m: Optional[int] = None) -> "Coupling":
        """Independent coupling of two uniform measures (every entry ``1/(nm)``)."""
        m = n if m is None else m
        return cls(np.full((n, m), 1.0 / (n * m)), np.full(n, 1.0 / n), np.full(m, 1.0 / m))

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "Coupling":
        """Scaled permutation matrix sending row ``i`` to column ``perm[i]``."""
        perm = np.asarray(perm, dtype=int)
        n = len(perm)
        plan = np.zeros((n, n))
        plan[np.arange(n), perm] = 1.0 / n
        uniform = np.full(n, 1.0 / n)
        return cls(plan, uniform, uniform)

    @classmethod
    def identity(cls, n: int) -> "Coupling":
        return cls.from_permutation(np.arange(n))


@dataclass(frozen=True, eq=False)
class Embedding(_ArrayLike):
    """Output coordinates plus whatever trace the producing method recorded.

    ``loss_trace`` holds ``(iteration, cost)`` pairs (GW cost for GW-MDS,
    stress for SMACOF, empty for closed-form methods).
    """

    coords: np.ndarray
    loss_trace: Tuple[Tuple[int, float], ...] = ()
    final_plan: Optional[Coupling] = None
    info: dict = field(default_factory=dict)
    _array_attr = "coords"

    def __post_init__(self):
        coords = _frozen(self.coords, 2, "coords")
        if coords.shape[1] < 1:
            raise ShapeMismatchError("embedding dimension must be >= 1")
        if not np.all(np.isfinite(coords)):
            raise NonFiniteError("embedding contains non-finite coordinates")
        trace = tuple((int(i), float(c)) for i, c in self.loss_trace)
        if any(not np.isfinite(c) or c < 0 for _, c in trace):
            raise NonFiniteError("loss trace values must be finite and >= 0")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "loss_trace", trace)

    @property
    def d(self) -> int:
        return self.coords.shape[1]

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def costs(self) -> np.ndarray:
        return np.array([c for _, c in self.loss_trace])


def as_matrix(x: Any) -> np.ndarray:
    """Plain float64 view of a value type or array-like."""
    return np.asarray(x, dtype=np.float64)
