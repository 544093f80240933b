import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import grid_value, lp_value
from ergodic_games.matrix_game import (
    MatrixGameSolution,
    RefinementError,
    certificate_residual,
    normalize_distribution,
    refine_solution,
    solve_matrix_game,
    solve_refined,
)


def test_matching_pennies():
    sol = solve_refined(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert sol.value == 0.0
    assert sol.row_strategy.tolist() == [0.5, 0.5]
    assert sol.col_strategy.tolist() == [0.5, 0.5]


def test_rock_paper_scissors():
    M = np.array([[0.0, -1, 1], [1, 0, -1], [-1, 1, 0]])
    sol = solve_refined(M)
    assert sol.value == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(sol.row_strategy, 1 / 3, atol=1e-15)
    assert math.fsum(sol.row_strategy) == 1.0


def test_saddle_point():
    M = np.array([[3.0, 5.0], [1.0, 4.0]])
    sol = solve_refined(M)
    assert sol.value == 3.0
    assert sol.row_strategy.tolist() == [1.0, 0.0]
    assert sol.col_strategy.tolist() == [1.0, 0.0]


def test_single_row_and_column():
    row = solve_matrix_game(np.array([[4.0, 2.0, 7.0]]))
    assert row.value == 2.0 and row.col_strategy.tolist() == [0.0, 1.0, 0.0]
    col = solve_matrix_game(np.array([[4.0], [2.0], [7.0]]))
    assert col.value == 7.0 and col.row_strategy.tolist() == [0.0, 0.0, 1.0]
    one = solve_refined(np.array([[3.5]]))
    assert one.value == 3.5


@pytest.mark.parametrize("M", [np.zeros((0, 2)), np.array([1.0, 2.0]), np.array([[np.nan, 1.0]])])
def test_bad_input(M):
    with pytest.raises(ValueError):
        solve_matrix_game(M)


def test_refinement_rejects_unbalanced_tight_sets():
    M = np.array([[1.0, 0.0], [0.0, 1.0]])
    raw = MatrixGameSolution(0.5, np.array([0.5, 0.5]), np.array([0.5, 0.5]), (0,), (0, 1))
    with pytest.raises(RefinementError):
        refine_solution(M, raw)


def test_normalize_distribution_exact_sum():
    p = normalize_distribution(np.array([0.1, 0.2, 0.3, -1e-17, 0.4000000001]))
    assert math.fsum(p) == 1.0 and p.min() >= 0.0
    with pytest.raises(ValueError):
        normalize_distribution(np.zeros(3))


def test_certificate_zero_for_exact_solution():
    M = np.array([[2.0, -1.0], [-1.0, 1.0]])
    sol = solve_refined(M)
    assert sol.value == pytest.approx(0.2)
    assert certificate_residual(M, sol) <= 1e-15


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), r=st.integers(1, 6), c=st.integers(1, 6))
def test_value_matches_highs_and_certificate_holds(seed, r, c):
    M = np.random.default_rng(seed).uniform(-5, 5, size=(r, c))
    sol = solve_refined(M)
    assert sol.value == pytest.approx(lp_value(M), abs=1e-9)
    assert certificate_residual(M, sol) <= 1e-9
    lo, hi = sol.guarantees(M)
    assert lo >= sol.value - 1e-9 and hi <= sol.value + 1e-9
    assert math.fsum(sol.row_strategy) == 1.0 and math.fsum(sol.col_strategy) == 1.0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), shift=st.floats(-100, 100), scale=st.floats(0.1, 10))
def test_affine_invariance(seed, shift, scale):
    M = np.random.default_rng(seed).uniform(-1, 1, size=(3, 3))
    a, b = solve_refined(M), solve_refined(scale * M + shift)
    assert b.value == pytest.approx(scale * a.value + shift, abs=1e-8 * (1 + abs(shift)))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_transpose_duality(seed):
    M = np.random.default_rng(seed).uniform(-1, 1, size=(3, 4))
    assert solve_refined(-M.T).value == pytest.approx(-solve_refined(M).value, abs=1e-10)


def test_grid_oracle_brackets_lp():
    M = np.array([[2.0, -1.0], [-1.0, 1.0]])
    lo, hi = grid_value(M)
    assert lo <= 0.2 <= hi and hi - lo <= 2e-3
