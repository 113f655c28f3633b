"""Dense two-phase simplex for small-row linear programs.

Solves  min c'x  subject to  Ax = b, x >= 0  with a dense tableau.  The
intended problem shapes have few rows (a handful of constraints) and possibly
millions of columns, so every pivot is one vectorized rank-1 update of the
tableau.  Entering columns follow Dantzig pricing with lowest-index
tie-breaking; after a stretch of degenerate pivots the rule switches to
Bland's rule, which guarantees termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import Infeasible, NonConverged, SolverError

_STALL_LIMIT = 40


@dataclass(frozen=True)
class LpResult:
    x: np.ndarray
    objective: float
    iterations: int


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colvals = T[:, col].copy()
    colvals[row] = 0.0
    # rank-1 elimination of the pivot column everywhere else
    T -= np.outer(colvals, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_phase(T, basis, allowed, tol, max_iter):
    """Pivot until optimal; returns iteration count. T[-1,-1] tracks -objective."""
    m = basis.shape[0]
    iters = 0
    bland = False
    stalled = 0
    last = T[-1, -1]
    while True:
        cost = T[-1, :-1]
        candidates = np.where(allowed & (cost < -tol))[0]
        if candidates.size == 0:
            return iters
        if bland:
            j = int(candidates[0])
        else:
            j = int(candidates[np.argmin(cost[candidates])])
        column = T[:m, j]
        positive = column > tol
        if not positive.any():
            raise SolverError("linear program is unbounded")
        ratios = np.full(m, np.inf)
        ratios[positive] = T[:m, -1][positive] / column[positive]
        best = ratios.min()
        ties = np.where(ratios <= best + tol * (1.0 + abs(best)))[0]
        row = int(ties[np.argmin(basis[ties])])
        _pivot(T, basis, row, j)
        iters += 1
        if iters >= max_iter:
            raise NonConverged("simplex iteration limit reached",
                               residual=float(-T[-1, -1]))
        if T[-1, -1] > last + tol * (1.0 + abs(last)):
            last = T[-1, -1]
            stalled = 0
        else:
            stalled += 1
            if stalled >= _STALL_LIMIT:
                bland = True


def simplex_solve(c, A, b, *, tol: float = 1e-9, max_iter: int | None = None) -> LpResult:
    """Two-phase simplex on the standard form min c'x, Ax = b, x >= 0."""
    A = np.array(A, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if A.ndim != 2:
        raise SolverError("A must be a matrix")
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,):
        raise SolverError("incompatible LP dimensions")

    # normalize rows for pivot-tolerance stability, flipping signs so b >= 0
    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0.0] = 1.0
    A /= scale[:, None]
    b /= scale
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    if max_iter is None:
        max_iter = 200 + 100 * (m + 1)

    # tableau: [original columns | artificial columns | rhs], plus a cost row
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = np.arange(n, n + m, dtype=np.int64)

    # phase 1: minimize the artificial sum, whose reduced cost row is
    # obtained by subtracting all constraint rows
    T[-1, :] = 0.0
    T[-1, n:n + m] = 1.0
    T[-1, :] -= T[:m, :].sum(axis=0)
    allowed = np.ones(n + m, dtype=bool)
    iters = _run_phase(T, basis, allowed, tol, max_iter)
    infeas = float(-T[-1, -1])
    if infeas > 1e-7:
        raise Infeasible(f"no feasible point (phase-1 residual {infeas:.3e})")

    # evict artificials still basic at level ~0; rows with no original pivot
    # element are redundant and stay inert from here on
    for i in range(m):
        if basis[i] >= n:
            row = np.abs(T[i, :n])
            j = int(np.argmax(row))
            if row[j] > 1e-7:
                _pivot(T, basis, i, j)
                iters += 1

    # phase 2 with the true objective; artificial columns are locked out
    T[-1, :] = 0.0
    T[-1, :n] = c
    for i in range(m):
        if basis[i] < n and c[basis[i]] != 0.0:
            T[-1, :] -= c[basis[i]] * T[i, :]
    allowed[n:] = False
    iters += _run_phase(T, basis, allowed, tol, max_iter)

    x = np.zeros(n)
    keep = basis < n
    x[basis[keep]] = T[:m, -1][keep]
    # tiny negative entries are pivot-tolerance dust
    np.clip(x, 0.0, None, out=x)
    return LpResult(x=x, objective=float(c @ x), iterations=iters)


def origin_hull_weights(points: np.ndarray, tol: float = 1e-9) -> np.ndarray | None:
    """Simplex weights writing 0 as a convex combination of the points, or
    None when 0 lies outside their convex hull.

    Runs phase 1 on  P'w = 0, sum(w) = 1, w >= 0  (d variables, p+1 rows).
    """
    P = np.asarray(points, dtype=np.float64)
    d, p = P.shape
    A = np.vstack([P.T, np.ones((1, d))])
    b = np.zeros(p + 1)
    b[-1] = 1.0
    try:
        res = simplex_solve(np.zeros(d), A, b, tol=tol)
    except Infeasible:
        return None
    w = res.x
    return w / w.sum()


def origin_in_hull(points: np.ndarray, tol: float = 1e-9) -> bool:
    """Feasibility check: does 0 lie in the convex hull of the given points?"""
    return origin_hull_weights(points, tol=tol) is not None
