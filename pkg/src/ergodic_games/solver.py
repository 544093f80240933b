"""Hoffman-Karp strategy iteration for ergodic concurrent mean-payoff games.

Both players run their own strategy iteration. Evaluating player 1's
strategy gives a lower bound on the value and evaluating player 2's an upper
bound, so alternating the two yields a certified bracket that is closed down
to the requested epsilon.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .evaluation import PotentialSolution, evaluate_strategy
from .game import ConcurrentGame, StationaryStrategy, ergodic_sufficient, uniform_strategy
from .matrix_game import solve_refined

logger = logging.getLogger(__name__)

OPT_TOL = 1e-8
THREADS_ENV = "ERGODIC_GAMES_THREADS"


class NonErgodicError(ValueError):
    pass


@dataclass
class SolveReport:
    lower: float
    upper: float
    epsilon_requested: float
    strategy_p1: StationaryStrategy
    strategy_p2: StationaryStrategy
    iterations_p1: int
    iterations_p2: int
    trace_p1: list[float] = field(default_factory=list)
    trace_p2: list[float] = field(default_factory=list)
    wall_time: float = 0.0
    termination: str = "converged"  # converged | max-iters | stalled

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def iterations(self) -> int:
        return max(self.iterations_p1, self.iterations_p2)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def local_matrix(game: ConcurrentGame, s: int, potential: np.ndarray) -> np.ndarray:
    """``M_s[a1, a2] = R(s, a1, a2) + OneSt(potential, a1, a2, s)``."""
    st = game.states[s]
    return st.reward + st.expected_next(potential)


def _improve_state(game, strat, potential, s):
    M = local_matrix(game, s, potential)
    old = strat[s]
    sol = solve_refined(M)
    scale = max(1.0, float(np.abs(M).max()))
    if strat.player == 1:
        keep = (old @ M).min() >= sol.value - OPT_TOL * scale
        new = sol.row_strategy
    else:
        keep = (M @ old).max() <= sol.value + OPT_TOL * scale
        new = sol.col_strategy
    return (old, False) if keep else (new, True)


def improve_once(
    game: ConcurrentGame, strat: StationaryStrategy, evaluation: PotentialSolution
) -> tuple[StationaryStrategy, bool]:
    """One synchronous improvement sweep over all states.

    At each state the local matrix game built from rewards plus expected
    potentials is solved; the old distribution is kept when it is already
    optimal there, otherwise the refined optimal distribution replaces it.
    """
    if evaluation.evaluated_player != strat.player:
        raise ValueError("evaluation belongs to the other player's strategy")
    v = evaluation.potential
    states = range(game.n_states)
    threads = _thread_count()
    try:
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                results = list(pool.map(lambda s: _improve_state(game, strat, v, s), states))
        else:
            results = [_improve_state(game, strat, v, s) for s in states]
    except ValueError as exc:
        raise ValueError(f"matrix game failed during improvement: {exc}") from exc
    changed = any(c for _, c in results)
    if not changed:
        return strat, False
    return StationaryStrategy(strat.player, tuple(p for p, _ in results)), True


def best_response_value(game: ConcurrentGame, strat: StationaryStrategy, target: int = 0) -> float:
    """What ``strat`` guarantees against an optimizing opponent."""
    return evaluate_strategy(game, strat, target).gain


def solve(
    game: ConcurrentGame,
    epsilon: float = 0.01,
    target: int = 0,
    max_iters: int = 100,
    *,
    seed: int | None = None,
    check_ergodic: bool = True,
    initial: tuple[StationaryStrategy, StationaryStrategy] | None = None,
) -> SolveReport:
    """Approximate the value of an ergodic game within ``epsilon``.

    Each round evaluates the current strategies of both players, updates the
    bracket, stops if it is narrower than ``epsilon`` and otherwise improves
    both strategies. ``seed`` selects a random initial profile instead of the
    uniform one.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if check_ergodic and not ergodic_sufficient(game):
        raise NonErgodicError(
            "game failed the sufficient ergodicity test; pass check_ergodic=False to solve anyway"
        )
    started = time.perf_counter()
    if initial is not None:
        sigma1, sigma2 = initial
    elif seed is None:
        sigma1, sigma2 = uniform_strategy(game, 1), uniform_strategy(game, 2)
    else:
        rng = np.random.default_rng(seed)
        sigma1 = StationaryStrategy(1, tuple(rng.dirichlet(np.ones(len(a))) for a in game.actions_p1))
        sigma2 = StationaryStrategy(2, tuple(rng.dirichlet(np.ones(len(a))) for a in game.actions_p2))

    lower, upper = -np.inf, np.inf
    best1, best2 = sigma1, sigma2
    trace1: list[float] = []
    trace2: list[float] = []
    live1 = live2 = True
    termination = "max-iters"
    it1 = it2 = 0
    for _ in range(max_iters):
        if live1:
            try:
                ev1 = evaluate_strategy(game, sigma1, target)
            except RuntimeError as exc:
                raise NonErgodicError(f"player-1 evaluation failed: {exc}") from exc
            it1 += 1
            trace1.append(ev1.gain)
            if ev1.gain > lower:
                lower, best1 = ev1.gain, sigma1
        if live2:
            try:
                ev2 = evaluate_strategy(game, sigma2, target)
            except RuntimeError as exc:
                raise NonErgodicError(f"player-2 evaluation failed: {exc}") from exc
            it2 += 1
            trace2.append(ev2.gain)
            if ev2.gain < upper:
                upper, best2 = ev2.gain, sigma2
        logger.info("round %d: bracket [%.9g, %.9g]", max(it1, it2), lower, upper)
        if upper - lower <= epsilon:
            termination = "converged"
            break
        if live1:
            sigma1, live1 = improve_once(game, sigma1, ev1)
        if live2:
            sigma2, live2 = improve_once(game, sigma2, ev2)
        if not live1 and not live2:
            termination = "stalled"
            break
    return SolveReport(
        lower=float(lower),
        upper=float(upper),
        epsilon_requested=epsilon,
        strategy_p1=best1,
        strategy_p2=best2,
        iterations_p1=it1,
        iterations_p2=it2,
        trace_p1=trace1,
        trace_p2=trace2,
        wall_time=time.perf_counter() - started,
        termination=termination,
    )
