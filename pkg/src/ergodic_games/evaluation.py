"""Evaluation of a fixed stationary strategy against a best-responding opponent.

Fixing one player's stationary strategy turns the game into an average-reward
MDP for the other player. Its optimal gain ``g`` and potentials ``v`` (with
``v[target] = 0``) satisfy, when player 1's strategy is fixed,

    g + v[s] = min_a2 ExpRew(s, strat, a2) + OneSt(v, strat(s), a2, s)

and the symmetric equations with ``max`` over player-1 actions when player
2's strategy is fixed. They are found from the linear program over
state-action occupation measures, whose optimal basis is a pure best
response; the basis system is then re-solved by Gaussian elimination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import ConcurrentGame, StationaryStrategy
from .linalg import LPInfeasibleError, LPUnboundedError, SingularSystemError, gauss_solve, simplex

TIGHT_TOL = 1e-9


class EvaluationError(RuntimeError):
    """The potential system has no solution: the game is not ergodic or is malformed."""


@dataclass(frozen=True)
class PotentialSolution:
    gain: float
    potential: np.ndarray
    target_state: int
    best_response: StationaryStrategy
    evaluated_player: int
    bellman_residual: float


def exp_rew(game: ConcurrentGame, s: int, strat: StationaryStrategy, a_opp: int) -> float:
    """Expected one-step reward at ``s`` when ``strat`` meets opponent action ``a_opp``."""
    R = game.states[s].reward
    col = R[:, a_opp] if strat.player == 1 else R[a_opp, :]
    return float(col @ strat[s])


def one_st(game: ConcurrentGame, potential, d1, d2, s: int) -> float:
    """Expected potential of the successor of ``s`` under action distributions ``d1``, ``d2``."""
    P = game.states[s].expected_next(np.asarray(potential, dtype=float))
    return float(np.asarray(d1, dtype=float) @ P @ np.asarray(d2, dtype=float))


def _opponent_columns(game: ConcurrentGame, strat: StationaryStrategy):
    """Rewards, transition rows and owning state of every (state, opponent action) column."""
    n = game.n_states
    opp = 3 - strat.player
    counts = [game.n_actions(opp, s) for s in range(n)]
    offsets = np.concatenate([[0], np.cumsum(counts)])
    ncols = int(offsets[-1])
    rewards = np.empty(ncols)
    trans = np.zeros((ncols, n))
    owner = np.repeat(np.arange(n), counts)
    for s, st in enumerate(game.states):
        m2 = st.reward.shape[1]
        sigma = strat[s]
        a1, a2 = np.divmod(st.pair, m2)
        if strat.player == 1:
            rewards[offsets[s] : offsets[s + 1]] = sigma @ st.reward
            weight, col = sigma[a1] * st.prob, offsets[s] + a2
        else:
            rewards[offsets[s] : offsets[s + 1]] = st.reward @ sigma
            weight, col = sigma[a2] * st.prob, offsets[s] + a1
        np.add.at(trans, (col, st.succ), weight)
    return rewards, trans, owner, offsets


def _solve_policy(rewards, trans, owner, policy_cols, target):
    """Gain and potentials of a pure opponent policy (one column per state)."""
    n = len(policy_cols)
    # unknowns: g, then v[s] for s != target
    free = np.array([s for s in range(n) if s != target], dtype=np.int64)
    a = np.zeros((n, n))
    a[:, 0] = 1.0
    full = np.eye(n) - trans[policy_cols]
    a[:, 1:] = full[:, free]
    sol = gauss_solve(a, rewards[policy_cols])
    v = np.zeros(n)
    v[free] = sol[1:]
    return float(sol[0]), v


def _slacks(rewards, trans, owner, g, v, sense):
    # sense=+1: opponent minimizes, optimal iff all slacks >= 0
    return sense * (rewards + trans @ v - g - v[owner])


def _policy_iteration(rewards, trans, owner, offsets, policy, target, sense, scale, max_rounds):
    """Improve a pure opponent policy until no column beats the current one."""
    for _ in range(max_rounds):
        g, v = _solve_policy(rewards, trans, owner, policy, target)
        slack = _slacks(rewards, trans, owner, g, v, sense)
        # the policy's own slacks are zero up to rounding; demand a real gain
        tol = 1e-11 * max(scale, float(np.abs(v).max()))
        improvable = slack < slack[policy[owner]] - tol
        if not improvable.any():
            break
        for s in np.unique(owner[improvable]).tolist():
            lo, hi = offsets[s], offsets[s + 1]
            policy[s] = lo + int(np.argmin(slack[lo:hi]))
    return policy


def evaluate_strategy(
    game: ConcurrentGame, strat: StationaryStrategy, target: int = 0, max_polish: int = 100
) -> PotentialSolution:
    """Gain and potentials of ``strat`` against an optimizing opponent.

    The gain is what ``strat`` guarantees: a lower bound on the game value
    for a player-1 strategy, an upper bound for a player-2 strategy.

    Policy iteration from the greedy one-step policy supplies a warm start
    basis; the simplex method then certifies (or restores) optimality of
    the occupation-measure LP, and its basis policy is re-solved exactly.
    """
    n = game.n_states
    if not 0 <= target < n:
        raise ValueError(f"target state {target} out of range")
    sense = 1.0 if strat.player == 1 else -1.0
    rewards, trans, owner, offsets = _opponent_columns(game, strat)
    ncols = len(rewards)
    scale = max(1.0, float(np.abs(rewards).max()))

    rows = np.array([s for s in range(n) if s != target], dtype=np.int64)
    incidence = np.zeros((n, ncols))
    incidence[owner, np.arange(ncols)] = 1.0
    A = np.vstack([(incidence - trans.T)[rows], np.ones((1, ncols))])
    b = np.zeros(n)
    b[-1] = 1.0
    policy = np.array(
        [offsets[s] + int(np.argmin(sense * rewards[offsets[s] : offsets[s + 1]])) for s in range(n)]
    )
    try:
        policy = _policy_iteration(rewards, trans, owner, offsets, policy, target, sense, scale, max_polish)
    except SingularSystemError:
        pass  # not unichain: the LP restarts from this basis or from phase one
    try:
        lp = simplex(sense * rewards, A, b, basis=policy)
    except (LPInfeasibleError, LPUnboundedError) as exc:
        raise EvaluationError(f"potential LP for player-{strat.player} strategy failed: {exc}") from exc

    # optimal basis -> pure policy, one column per state
    policy = np.full(n, -1, dtype=np.int64)
    best_x = np.full(n, -np.inf)
    for col in lp.basis.tolist():
        s = owner[col]
        if lp.x[col] > best_x[s]:
            best_x[s], policy[s] = lp.x[col], col
    for s in np.flatnonzero(policy < 0):
        lo, hi = offsets[s], offsets[s + 1]
        policy[s] = lo + int(np.argmin(lp.reduced_costs[lo:hi]))

    try:
        policy = _policy_iteration(rewards, trans, owner, offsets, policy, target, sense, scale, max_polish)
        g, v = _solve_policy(rewards, trans, owner, policy, target)
    except SingularSystemError as exc:
        raise EvaluationError(f"potential system of player-{strat.player} strategy is singular: {exc}") from exc

    slack = _slacks(rewards, trans, owner, g, v, sense)
    choice = []
    for s in range(n):
        lo, hi = offsets[s], offsets[s + 1]
        tight = np.flatnonzero(slack[lo:hi] < TIGHT_TOL * scale)
        choice.append(int(tight[0]) if tight.size else int(np.argmin(slack[lo:hi])))
    best_response = StationaryStrategy.pure(game, 3 - strat.player, choice)
    residual = float(np.max([np.abs(slack[offsets[s] : offsets[s + 1]].min()) for s in range(n)]))
    return PotentialSolution(
        gain=g,
        potential=v,
        target_state=target,
        best_response=best_response,
        evaluated_player=strat.player,
        bellman_residual=residual,
    )


def bellman_residual(game: ConcurrentGame, strat: StationaryStrategy, sol: PotentialSolution) -> float:
    """``max_s |g + v[s] - opt_a (ExpRew + OneSt)|`` recomputed from the game tables."""
    worst = 0.0
    opp = 3 - strat.player
    for s in range(game.n_states):
        vals = []
        for a in range(game.n_actions(opp, s)):
            d_opp = np.zeros(game.n_actions(opp, s))
            d_opp[a] = 1.0
            d1, d2 = (strat[s], d_opp) if strat.player == 1 else (d_opp, strat[s])
            vals.append(exp_rew(game, s, strat, a) + one_st(game, sol.potential, d1, d2, s))
        best = min(vals) if strat.player == 1 else max(vals)
        worst = max(worst, abs(sol.gain + sol.potential[s] - best))
    return worst
