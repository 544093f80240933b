"""Signing attacks between two proof-of-stake pools.

State ``(i, j, p)``: pool A holds ``i * eps`` of the stake, pool B holds
``j * eps`` and ``p`` is the network connectivity level. Both pools either
sign (``sign``) or refuse to sign (``refuse``) the other's blocks. Player 1
is pool A and the reward is A's expected revenue per round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..game import ConcurrentGame
from .migration import joint_move

ACTIONS = ("sign", "refuse")


@dataclass(frozen=True)
class ProofOfStakeParams:
    n: int = 3
    p_step: float = 0.01
    mining_reward: float = 10.0
    signing_reward: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        levels = 1.0 / self.p_step
        if self.p_step <= 0 or abs(levels - round(levels)) > 1e-9:
            raise ValueError(f"p_step must divide 1, got {self.p_step}")

    @property
    def eps(self) -> float:
        return 1.0 / (2 * self.n + 1)

    @property
    def connectivity(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, round(1.0 / self.p_step) + 1)


def poisson_cdf(lam: float, x: float) -> float:
    """``P[X <= x]`` for ``X ~ Poisson(lam)``."""
    if lam < 0:
        raise ValueError(f"rate must be non-negative, got {lam}")
    if x < 0:
        return 0.0
    term = math.exp(-lam)
    total = term
    for k in range(1, math.floor(x) + 1):
        term *= lam / k
        total += term
    return min(total, 1.0)


def pool_revenue(params: ProofOfStakeParams, i: int, j: int, p: float, own_signs: bool, other_signs: bool) -> float:
    """Expected revenue of a pool with stake ``i * eps`` against one with ``j * eps``.

    ``own_signs``/``other_signs`` say whether each pool signs the other's blocks.
    """
    eps = params.eps
    a, b = i * eps, j * eps
    lam = (1.0 - a - b) * p
    if a >= 0.5:
        accepted = 1.0
    elif other_signs and a + b >= 0.5:
        accepted = 1.0
    elif not other_signs:
        accepted = 1.0 - poisson_cdf(lam, 0.5 - a)
    else:
        accepted = 1.0 - poisson_cdf(lam, 0.5 - a - b)
    r1 = params.mining_reward * a * accepted
    r2 = b * (a * params.signing_reward if own_signs else 0.0)
    r3 = a * params.signing_reward * (1.0 - b)
    return r1 + r2 + r3


def connectivity_move(k: int, levels: int) -> dict[int, float]:
    """Stay or step to a neighbouring level with equal probability."""
    near = [t for t in (k - 1, k, k + 1) if 0 <= t < levels]
    return {t: 1.0 / len(near) for t in near}


def gen_proof_of_stake(params: ProofOfStakeParams) -> ConcurrentGame:
    n, eps = params.n, params.eps
    grid = params.connectivity
    levels = len(grid)
    states = [(i, j, k) for i in range(1, n + 1) for j in range(1, n + 1) for k in range(levels)]

    def index(i, j, k):
        return ((i - 1) * n + (j - 1)) * levels + k

    def entries():
        for s, (i, j, k) in enumerate(states):
            p = float(grid[k])
            pmove = connectivity_move(k, levels)
            for a1, a_signs in enumerate((True, False)):
                for a2, b_signs in enumerate((True, False)):
                    r_a = pool_revenue(params, i, j, p, a_signs, b_signs)
                    r_b = pool_revenue(params, j, i, p, b_signs, a_signs)
                    moves = joint_move(i, j, n, r_a / (i * eps), r_b / (j * eps))
                    dist = [
                        (index(i2, j2, k2), q * pk)
                        for (i2, j2), q in sorted(moves.items())
                        for k2, pk in pmove.items()
                    ]
                    yield s, a1, a2, r_a, dist

    labels = [f"({i},{j},{grid[k]:.4g})" for i, j, k in states]
    acts = [list(ACTIONS)] * len(states)
    return ConcurrentGame.from_entries(len(states), acts, acts, entries(), labels)
