"""Zero-sum matrix games: LP solve plus tight-constraint refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .linalg import SingularSystemError, gauss_solve, simplex

SLACK_TOL = 1e-9


class RefinementError(ArithmeticError):
    """The tight-constraint system could not be re-solved; keep the raw solution."""


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray  # maximizer
    col_strategy: np.ndarray  # minimizer
    tight_rows: tuple[int, ...]  # rows i with (M y)_i == value
    tight_cols: tuple[int, ...]  # columns j with (x^T M)_j == value

    def guarantees(self, M: np.ndarray) -> tuple[float, float]:
        """(worst payoff of the row strategy, worst payoff of the column strategy)."""
        M = np.asarray(M, dtype=float)
        return float((self.row_strategy @ M).min()), float((M @ self.col_strategy).max())


def certificate_residual(M: np.ndarray, sol: MatrixGameSolution) -> float:
    """How far ``sol`` is from a certified equilibrium.

    Combines the distribution defects of both strategies with the violations
    of the mutual guarantee ``min_j (x^T M)_j >= value >= max_i (M y)_i``;
    zero for an exact solution.
    """
    M = np.asarray(M, dtype=float)
    x, y = sol.row_strategy, sol.col_strategy
    lo, hi = float((x @ M).min()), float((M @ y).max())
    return max(
        abs(math.fsum(x) - 1.0),
        abs(math.fsum(y) - 1.0),
        max(0.0, -float(x.min())),
        max(0.0, -float(y.min())),
        sol.value - lo,
        hi - sol.value,
        0.0,
    )


def normalize_distribution(p: np.ndarray) -> np.ndarray:
    """Clamp negatives to zero and give the missing mass to the largest entry.

    The result sums to exactly one under ``math.fsum``.
    """
    p = np.where(p > 0.0, np.asarray(p, dtype=float), 0.0)
    total = p.sum()
    if total <= 0.0:
        raise ValueError("distribution has no positive mass")
    p = p / total
    k = int(np.argmax(p))
    for _ in range(4):
        gap = 1.0 - math.fsum(p)
        if gap == 0.0:
            break
        p[k] += gap
    return p


def _tight_sets(M, x, y, value, tol=SLACK_TOL):
    scale = max(1.0, float(np.abs(M).max()))
    rows = tuple(np.flatnonzero((M @ y) >= value - tol * scale).tolist())
    cols = tuple(np.flatnonzero((x @ M) <= value + tol * scale).tolist())
    return rows, cols


def solve_matrix_game(M) -> MatrixGameSolution:
    """Minimax value and optimal mixed strategies of the payoff matrix ``M``.

    Row player maximizes. Solved as the shifted LP
    ``max 1^T w  s.t.  (M + k) w <= 1, w >= 0`` whose primal gives the column
    strategy and whose duals give the row strategy.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"payoff matrix must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("payoff matrix has non-finite entries")
    r, c = M.shape
    if r == 1 or c == 1:
        return _solve_degenerate(M)
    shift = 1.0 - float(M.min())
    Mp = M + shift
    A = np.hstack([Mp, np.eye(r)])
    cost = np.concatenate([-np.ones(c), np.zeros(r)])
    lp = simplex(cost, A, np.ones(r), basis=np.arange(c, c + r))
    w = lp.x[:c]
    u = -lp.duals
    y = normalize_distribution(w)
    x = normalize_distribution(u)
    value = float(1.0 / w.sum() - shift)
    rows, cols = _tight_sets(M, x, y, value)
    return MatrixGameSolution(value=value, row_strategy=x, col_strategy=y, tight_rows=rows, tight_cols=cols)


def _solve_degenerate(M: np.ndarray) -> MatrixGameSolution:
    r, c = M.shape
    x = np.zeros(r)
    y = np.zeros(c)
    if r == 1:
        j = int(np.argmin(M[0]))
        x[0] = 1.0
        y[j] = 1.0
        value = float(M[0, j])
    else:
        i = int(np.argmax(M[:, 0]))
        x[i] = 1.0
        y[0] = 1.0
        value = float(M[i, 0])
    rows, cols = _tight_sets(M, x, y, value)
    return MatrixGameSolution(value=value, row_strategy=x, col_strategy=y, tight_rows=rows, tight_cols=cols)


def refine_solution(M, raw: MatrixGameSolution, slack_tol: float = SLACK_TOL) -> MatrixGameSolution:
    """Re-solve the tight constraints of ``raw`` exactly by Gaussian elimination.

    The active rows and columns are the tight constraints restricted to the
    strategies' supports. When both sets have the same size ``k`` the
    equal-payoff conditions ``x_I^T M[I, J] = z 1`` and ``M[I, J] y_J = z 1``
    are rewritten as differences against one tight constraint, which
    together with ``sum = 1`` gives two ``k x k`` systems; otherwise, or when a system is singular or
    yields negative probabilities, RefinementError is raised. If the refined
    pair certifies worse than ``raw`` does, ``raw`` is returned unchanged.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape == (1, 1):
        return raw
    x_raw, y_raw = raw.row_strategy, raw.col_strategy
    rows = [i for i in raw.tight_rows if x_raw[i] > slack_tol]
    cols = [j for j in raw.tight_cols if y_raw[j] > slack_tol]
    if len(rows) != len(cols) or not rows:
        raise RefinementError(f"tight system is {len(cols)} x {len(rows)}")
    k = len(rows)
    sub = M[np.ix_(rows, cols)]
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    # equalize the tight payoffs against the first one, then sum to one:
    # sum_i x_i (M[i, j] - M[i, j0]) = 0 for j in J \ {j0}; sum_i x_i = 1
    a_row = np.ones((k, k))
    a_row[:-1] = (sub[:, 1:] - sub[:, :1]).T
    a_col = np.ones((k, k))
    a_col[:-1] = sub[1:] - sub[:1]
    try:
        xs = gauss_solve(a_row, rhs)
        ys = gauss_solve(a_col, rhs)
    except SingularSystemError as exc:
        raise RefinementError(str(exc)) from exc
    if xs.min() < -slack_tol or ys.min() < -slack_tol:
        raise RefinementError("tight system gives negative probabilities")
    x = np.zeros_like(x_raw)
    y = np.zeros_like(y_raw)
    x[rows] = xs
    y[cols] = ys
    x = normalize_distribution(x)
    y = normalize_distribution(y)
    value = float(x @ M @ y)
    t_rows, t_cols = _tight_sets(M, x, y, value)
    refined = MatrixGameSolution(value=value, row_strategy=x, col_strategy=y, tight_rows=t_rows, tight_cols=t_cols)
    if certificate_residual(M, refined) > certificate_residual(M, raw):
        return raw
    return refined


def solve_refined(M) -> MatrixGameSolution:
    """LP solve followed by refinement, falling back to the mass-repair heuristic."""
    raw = solve_matrix_game(M)
    try:
        return refine_solution(M, raw)
    except RefinementError:
        return replace(
            raw,
            row_strategy=normalize_distribution(raw.row_strategy),
            col_strategy=normalize_distribution(raw.col_strategy),
        )
