"""Dense linear-algebra kernels: Gaussian elimination and a tableau simplex."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve


class SingularSystemError(ArithmeticError):
    pass


class LPInfeasibleError(ArithmeticError):
    pass


class LPUnboundedError(ArithmeticError):
    pass


def gauss_solve(a: np.ndarray, b: np.ndarray, tol: float = 1e-13, refine_steps: int = 1) -> np.ndarray:
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    The factorization is LAPACK's row-pivoted LU. ``b`` may be a vector or
    a matrix of right-hand sides. A pivot whose magnitude falls below
    ``tol`` times the largest entry of ``a`` raises SingularSystemError.
    ``refine_steps`` rounds of residual correction reuse the factors.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n) or b.shape[0] != n:
        raise ValueError(f"incompatible shapes {a.shape} and {b.shape}")
    scale = np.abs(a).max() if a.size else 0.0
    if scale == 0.0 or not np.isfinite(scale):
        raise SingularSystemError("zero or non-finite matrix")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() <= tol * scale:
        raise SingularSystemError(f"pivot {int(np.argmin(pivots))} vanishes")
    x = lu_solve((lu, piv), b, check_finite=False)
    for _ in range(refine_steps):
        resid = b - a @ x
        if not np.any(resid):
            break
        x = x + lu_solve((lu, piv), resid, check_finite=False)
    return x


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    basis: np.ndarray  # column index per constraint row
    duals: np.ndarray  # y with c - A^T y >= 0 at optimum
    reduced_costs: np.ndarray
    pivots: int


def simplex(
    c: np.ndarray,
    A: np.ndarray,
    b: np.ndarray,
    basis: np.ndarray | None = None,
    *,
    tol: float = 1e-11,
    max_pivots: int = 50_000,
) -> LPResult:
    """Minimize ``c @ x`` subject to ``A @ x = b``, ``x >= 0``.

    Dense tableau method. Entering column: most negative reduced cost, lowest
    index on ties; after a run of degenerate pivots it switches to Bland's
    rule until the objective moves again. Leaving row: minimum ratio, ties
    broken by the lowest basic column index. The run is fully deterministic.

    ``basis`` may name a starting basis (one column per row). If it is
    singular or infeasible the solver falls back to a phase-one start with
    artificial columns. ``A`` must have full row rank.
    """
    c = np.asarray(c, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape

    tableau = None
    if basis is not None:
        basis = np.asarray(basis, dtype=np.int64)
        try:
            Binv_Ab = np.linalg.solve(A[:, basis], np.column_stack([A, b]))
        except np.linalg.LinAlgError:
            Binv_Ab = None
        if Binv_Ab is not None and np.all(np.isfinite(Binv_Ab)) and Binv_Ab[:, -1].min() >= -1e-9:
            Binv_Ab[:, -1] = np.maximum(Binv_Ab[:, -1], 0.0)
            tableau = Binv_Ab
            Binv_Ab[:, basis] = np.eye(m)
    pivots = 0
    if tableau is None:
        sign = np.where(b < 0, -1.0, 1.0)
        tableau = np.hstack([A * sign[:, None], np.eye(m), (b * sign)[:, None]])
        basis = np.arange(n, n + m)
        phase1_cost = np.concatenate([np.zeros(n), np.ones(m)])
        pivots += _iterate(tableau, basis, phase1_cost, tol, max_pivots, allowed=n + m)
        if tableau[:, -1] @ phase1_cost[basis] > 1e-9 * max(1.0, np.abs(b).max()):
            raise LPInfeasibleError("phase one ended with positive artificial mass")
        for r in np.flatnonzero(basis >= n):
            row = tableau[r, :n]
            q = int(np.argmax(np.abs(row)))
            if abs(row[q]) <= tol:
                raise LPInfeasibleError("constraint matrix is rank deficient")
            _pivot(tableau, basis, r, q)
            pivots += 1
        tableau = np.hstack([tableau[:, :n], tableau[:, -1:]])
    pivots += _iterate(tableau, basis, c, tol, max_pivots, allowed=n)

    x = np.zeros(n)
    x[basis] = tableau[:, -1]
    duals = np.linalg.solve(A[:, basis].T, c[basis])
    reduced = c - A.T @ duals
    return LPResult(x=x, objective=float(c @ x), basis=basis.copy(), duals=duals, reduced_costs=reduced, pivots=pivots)


def _pivot(tableau: np.ndarray, basis: np.ndarray, r: int, q: int) -> None:
    tableau[r] /= tableau[r, q]
    col = tableau[:, q].copy()
    col[r] = 0.0
    tableau -= np.outer(col, tableau[r])
    basis[r] = q


def _iterate(tableau, basis, cost, tol, max_pivots, allowed) -> int:
    m = tableau.shape[0]
    pivots = 0
    degenerate_run = 0
    while True:
        y_row = cost[basis] @ tableau[:, :allowed]
        reduced = cost[:allowed] - y_row
        scale = max(1.0, np.abs(cost[:allowed]).max())
        candidates = np.flatnonzero(reduced < -tol * scale)
        if candidates.size == 0:
            return pivots
        if degenerate_run > 50:
            q = int(candidates[0])
        else:
            q = int(candidates[np.argmin(reduced[candidates])])
        col = tableau[:, q]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            raise LPUnboundedError(f"column {q} is an unbounded direction")
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, best)]
        r = int(ties[np.argmin(basis[ties])])
        degenerate_run = degenerate_run + 1 if best <= 1e-12 else 0
        _pivot(tableau, basis, r, q)
        pivots += 1
        if pivots > max_pivots:
            raise ArithmeticError(f"simplex exceeded {max_pivots} pivots on a {m}-row problem")
