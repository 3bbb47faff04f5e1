"""Exact linear OT oracle and a conditional-gradient Gromov-Wasserstein solver.

Only the balanced, equal-size, uniform-weight case is supported: couplings
are ``n x n`` with every marginal equal to ``1/n``. In that setting the
vertices of the transport polytope are scaled permutation matrices, so the
linear subproblem is a linear assignment problem.

The GW objective with squared loss is::

    F(P) = sum_{i,j,k,l} (CX[i,j] - CY[k,l])**2 * P[i,k] * P[j,l]

and is evaluated in O(n^3) through the factorisation
``F(P) = <P, const(P) - 2 CX P CY>`` with
``const[i,k] = (CX**2 @ a)[i] + (CY**2 @ b)[k]``, ``a = P 1``, ``b = P^T 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonFiniteError, ShapeMismatchError
from .types import Coupling, as_matrix

FW_MAX_ITERS = 200
FW_TOL = 1e-9


@dataclass(frozen=True)
class GWSolveResult:
    plan: Coupling
    cost: float
    fw_iterations: int
    converged: bool
    cost_trace: List[float] = field(default_factory=list)


def linear_ot_cost(cost, plan) -> float:
    """``sum_ij plan[i, j] * cost[i, j]``."""
    c = as_matrix(cost)
    p = as_matrix(plan)
    if c.shape != p.shape:
        raise ShapeMismatchError(f"cost shape {c.shape} != plan shape {p.shape}")
    return float(np.sum(c * p))


def _assignment(cost: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(cost)):
        raise NonFiniteError("cost matrix contains non-finite entries")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols
    return perm


def linear_ot_oracle(cost) -> Coupling:
    """Optimal coupling between two uniform measures of equal size.

    Returns the optimal vertex ``P / n`` where ``P`` solves the linear
    assignment problem on ``cost`` (entries may be negative).
    """
    c = as_matrix(cost)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeMismatchError(f"the oracle needs a square cost matrix, got {c.shape}")
    return Coupling.from_permutation(_assignment(c))


def _check_shapes(cx: np.ndarray, cy: np.ndarray, p: np.ndarray) -> None:
    if cx.ndim != 2 or cx.shape[0] != cx.shape[1] or cy.ndim != 2 or cy.shape[0] != cy.shape[1]:
        raise ShapeMismatchError("cost matrices must be square")
    if p.shape != (cx.shape[0], cy.shape[0]):
        raise ShapeMismatchError(f"plan shape {p.shape} does not match costs {cx.shape[0]}x{cy.shape[0]}")


def _const_term(cx2: np.ndarray, cy2: np.ndarray, p: np.ndarray) -> np.ndarray:
    return (cx2 @ p.sum(axis=1))[:, None] + (cy2 @ p.sum(axis=0))[None, :]


def gw_cost(cost_x, cost_y, plan) -> float:
    """Gromov-Wasserstein objective of ``plan`` (squared loss)."""
    cx, cy, p = as_matrix(cost_x), as_matrix(cost_y), as_matrix(plan)
    _check_shapes(cx, cy, p)
    const = _const_term(cx * cx, cy * cy, p)
    return max(float(np.sum(p * (const - 2.0 * (cx @ p @ cy)))), 0.0)


def gw_gradient_plan(cost_x, cost_y, plan) -> np.ndarray:
    """Gradient of the GW objective with respect to the entries of ``plan``.

    ``2 * (const - 2 * CX @ P @ CY)``, where ``const`` uses the actual
    marginals of ``plan``; for a feasible plan these are the prescribed
    masses. Requires symmetric cost matrices.
    """
    cx, cy, p = as_matrix(cost_x), as_matrix(cost_y), as_matrix(plan)
    _check_shapes(cx, cy, p)
    return 2.0 * (_const_term(cx * cx, cy * cy, p) - 2.0 * (cx @ p @ cy))


def solve_gw(cost_x, cost_y, max_iter: int = FW_MAX_ITERS, tol: float = FW_TOL,
             init_plan: Optional[Coupling] = None) -> GWSolveResult:
    """Minimise the GW objective over uniform couplings by Frank-Wolfe.

    Each iteration linearises the objective at the current plan, picks the
    best vertex with :func:`linear_ot_oracle` and moves towards it with an
    exact line search (the objective is quadratic along the segment).
    Stops when the relative decrease drops below ``tol``, when the
    Frank-Wolfe gap vanishes, or after ``max_iter`` iterations.

    Parameters
    ----------
    cost_x, cost_y : (n, n) symmetric arrays or DistanceMatrix
    max_iter : int
    tol : float
        Relative decrease threshold.
    init_plan : Coupling, optional
        Starting plan; defaults to the product coupling ``1/n^2``.

    Returns
    -------
    GWSolveResult
        ``cost_trace`` starts with the cost of the initial plan and is
        nonincreasing.
    """
    cx, cy = as_matrix(cost_x), as_matrix(cost_y)
    n = cx.shape[0]
    if cy.shape[0] != n:
        raise ShapeMismatchError(f"GW solver requires equal sizes, got {n} and {cy.shape[0]}")
    if init_plan is None:
        p = np.full((n, n), 1.0 / (n * n))
    else:
        p = np.array(as_matrix(init_plan))
    _check_shapes(cx, cy, p)
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    # marginals never change along Frank-Wolfe segments between feasible
    # plans, so the constant term is computed once
    const = _const_term(cx * cx, cy * cy, p)
    a_mat = cx @ p @ cy
    cost = float(np.sum(p * (const - 2.0 * a_mat)))
    trace = [max(cost, 0.0)]
    converged = False
    it = 0
    while it < max_iter:
        it += 1
        grad = 2.0 * (const - 2.0 * a_mat)
        perm = _assignment(grad)
        vertex = np.zeros_like(p)
        vertex[np.arange(n), perm] = 1.0 / n
        direction = vertex - p
        slope = float(np.sum(grad * direction))
        if slope >= 0.0:
            converged = True
            break
        q_mat = cx @ direction @ cy
        curvature = -2.0 * float(np.sum(direction * q_mat))
        if curvature > 0.0:
            step = min(1.0, -slope / (2.0 * curvature))
        else:
            step = 1.0
        new_p = (1.0 - step) * p + step * vertex
        new_a = cx @ new_p @ cy
        new_cost = float(np.sum(new_p * (const - 2.0 * new_a)))
        if new_cost > cost:
            # round-off at the optimum; keep the better plan
            converged = True
            break
        decrease = cost - new_cost
        p, a_mat, cost = new_p, new_a, new_cost
        trace.append(max(cost, 0.0))
        if decrease <= tol * abs(cost + decrease):
            converged = True
            break

    uniform = np.full(n, 1.0 / n)
    plan = Coupling(p, uniform, uniform)
    return GWSolveResult(plan=plan, cost=gw_cost(cx, cy, p), fw_iterations=it,
                         converged=converged, cost_trace=trace)
