"""Monte-Carlo estimation of the mean payoff of a stationary strategy profile.

Each batch is an independent walk whose uniforms come from its own
``numpy.random.Generator(PCG64(seed + batch))``, three draws per step (player
1 action, player 2 action, successor). The walk itself runs in a compiled
loop over those uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .game import ConcurrentGame, StationaryStrategy

RNG_ALGORITHM = "numpy-PCG64(seed+batch), 3 uniforms/step: a1, a2, successor"
CHUNK = 1 << 18


@dataclass(frozen=True)
class SimulationResult:
    mean_payoff_estimate: float
    half_width_95: float
    steps: int
    batches: int
    seed: int
    start: int
    batch_means: tuple[float, ...]
    rng: str = RNG_ALGORITHM


@numba.njit(cache=True)
def _walk(state, u, cum1, off1, cum2, off2, m2, joint_off, tr_off, tr_cum, tr_succ, counts):
    for k in range(u.shape[0]):
        lo, hi = off1[state], off1[state + 1]
        a1 = lo
        while a1 < hi - 1 and u[k, 0] >= cum1[a1]:
            a1 += 1
        a1 -= lo
        lo, hi = off2[state], off2[state + 1]
        a2 = lo
        while a2 < hi - 1 and u[k, 1] >= cum2[a2]:
            a2 += 1
        a2 -= lo
        j = joint_off[state] + a1 * m2[state] + a2
        counts[j] += 1
        lo, hi = tr_off[j], tr_off[j + 1]
        t = lo
        while t < hi - 1 and u[k, 2] >= tr_cum[t]:
            t += 1
        state = tr_succ[t]
    return state


def _cumulative(probs):
    offsets = np.zeros(len(probs) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(p) for p in probs])
    cum = np.concatenate([np.cumsum(p) for p in probs]).astype(np.float64)
    return cum, offsets


def _tables(game: ConcurrentGame, s1: StationaryStrategy, s2: StationaryStrategy):
    cum1, off1 = _cumulative(s1.probs)
    cum2, off2 = _cumulative(s2.probs)
    shapes = [st.reward.shape for st in game.states]
    m2 = np.array([c for _, c in shapes], dtype=np.int64)
    joint_off = np.zeros(game.n_states + 1, dtype=np.int64)
    joint_off[1:] = np.cumsum([r * c for r, c in shapes])
    rewards = np.concatenate([st.reward.ravel() for st in game.states])
    tr_off = [0]
    tr_cum, tr_succ = [], []
    for st in game.states:
        m1, m2s = st.reward.shape
        order = np.argsort(st.pair, kind="stable")
        pair, succ, prob = st.pair[order], st.succ[order], st.prob[order]
        bounds = np.searchsorted(pair, np.arange(m1 * m2s + 1))
        for k in range(m1 * m2s):
            lo, hi = bounds[k], bounds[k + 1]
            tr_cum.append(np.cumsum(prob[lo:hi]))
            tr_succ.append(succ[lo:hi])
            tr_off.append(tr_off[-1] + hi - lo)
    return (
        cum1,
        off1,
        cum2,
        off2,
        m2,
        joint_off,
        np.asarray(tr_off, dtype=np.int64),
        np.concatenate(tr_cum).astype(np.float64),
        np.concatenate(tr_succ).astype(np.int64),
        rewards,
    )


def _check_profile(game, s1, s2):
    if s1.player != 1 or s2.player != 2:
        raise ValueError("expected a player-1 and a player-2 strategy")
    for strat in (s1, s2):
        if len(strat) != game.n_states:
            raise ValueError(f"player-{strat.player} strategy covers {len(strat)} states, game has {game.n_states}")
        for s in range(game.n_states):
            m = game.n_actions(strat.player, s)
            if strat[s].shape != (m,):
                raise ValueError(
                    f"state {s}: player-{strat.player} strategy has {strat[s].size} entries for {m} actions"
                )


def simulate_profile(
    game: ConcurrentGame,
    s1: StationaryStrategy,
    s2: StationaryStrategy,
    start: int = 0,
    steps: int = 100_000,
    batches: int = 32,
    seed: int = 0,
) -> SimulationResult:
    """Batch-means estimate of the long-run average reward of ``(s1, s2)``.

    Runs ``batches`` independent walks of ``steps`` steps from ``start``. Each
    batch average is computed from per-(state, action pair) visit
    frequencies, so constant rewards are reproduced exactly.
    """
    if steps < 1 or batches < 2:
        raise ValueError("need steps >= 1 and batches >= 2")
    if not 0 <= start < game.n_states:
        raise ValueError(f"start state {start} out of range")
    _check_profile(game, s1, s2)
    (cum1, off1, cum2, off2, m2, joint_off, tr_off, tr_cum, tr_succ, rewards) = _tables(game, s1, s2)
    means = []
    for b in range(batches):
        rng = np.random.Generator(np.random.PCG64(seed + b))
        counts = np.zeros(len(rewards), dtype=np.int64)
        state = start
        done = 0
        while done < steps:
            k = min(CHUNK, steps - done)
            u = rng.random((k, 3))
            state = _walk(state, u, cum1, off1, cum2, off2, m2, joint_off, tr_off, tr_cum, tr_succ, counts)
            done += k
        visited = np.flatnonzero(counts)
        means.append(math.fsum((counts[visited] / steps) * rewards[visited]))
    means_arr = np.asarray(means)
    # shift by the first batch so identical batch means give an exact estimate
    dev = means_arr - means_arr[0]
    estimate = float(means_arr[0] + dev.mean())
    half = float(1.96 * dev.std(ddof=1) / math.sqrt(batches))
    return SimulationResult(
        mean_payoff_estimate=estimate,
        half_width_95=half,
        steps=steps,
        batches=batches,
        seed=seed,
        start=start,
        batch_means=tuple(float(m) for m in means),
    )
