"""Zero-confirmation double spending: a seller against a malicious buyer.

State 0 is the shuffling state; state ``i`` in ``1..n`` has double-spend
success probability ``p_i = 0.1 + (i - 1) * 0.4 / n``. The seller (player 1)
chooses whether to reconnect and whether to wait for a confirmation, the
buyer (player 2) how many units ``d`` to double spend. Rewards are the
seller's profit.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..game import ConcurrentGame

SELLER_ACTIONS = ("accept", "reconnect", "confirm", "reconnect+confirm")
_RECONNECT = (False, True, False, True)
_CONFIRM = (False, False, True, True)


@dataclass(frozen=True)
class DoubleSpendParams:
    n: int = 99
    p_dc: float = 0.001
    profit: float = 0.5
    impatient: float = 0.5
    max_attack: int = 20
    honest_volume: float = 10.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 0 < self.p_dc < 1:
            raise ValueError("p_dc must lie in (0, 1)")
        if self.max_attack < 1:
            raise ValueError("max_attack must be positive")

    def success_probability(self, i: int) -> float:
        return 0.1 + (i - 1) * 0.4 / self.n


def seller_reward(params: DoubleSpendParams, s: int, a1: int, d: int) -> float:
    p_a = 0.0 if _CONFIRM[a1] else params.success_probability(s)
    p = params.profit
    r1 = d * p * (1 - p_a) - d * (1 - p) * p_a
    r2 = params.honest_volume * p * ((1 - params.impatient) if _CONFIRM[a1] else 1.0)
    return r1 + r2


def transition(params: DoubleSpendParams, s: int, a1: int) -> dict[int, float]:
    """Successor distribution from non-shuffling state ``s``; independent of the buyer."""
    n = params.n
    if _RECONNECT[a1]:
        return {0: 1.0}
    p_a = 0.0 if _CONFIRM[a1] else params.success_probability(s)
    near = [t for t in (s - 1, s, s + 1) if 1 <= t <= n]
    dist = {0: params.p_dc * (1 - p_a)}
    for t in near:
        dist[t] = dist.get(t, 0.0) + (1 - p_a) / len(near) * (1 - params.p_dc)
    if p_a > 0:
        dist[n] = dist.get(n, 0.0) + p_a
    return dist


def gen_double_spend(params: DoubleSpendParams) -> ConcurrentGame:
    n = params.n
    attacks = [f"spend-{d}" for d in range(1, params.max_attack + 1)]
    actions_p1 = [["wait"]] + [list(SELLER_ACTIONS)] * n
    actions_p2 = [["none"]] + [attacks] * n

    def entries():
        yield 0, 0, 0, 0.0, [(i, 1.0 / n) for i in range(1, n + 1)]
        for s in range(1, n + 1):
            for a1 in range(len(SELLER_ACTIONS)):
                dist = sorted(transition(params, s, a1).items())
                for k in range(params.max_attack):
                    yield s, a1, k, seller_reward(params, s, a1, k + 1), dist

    labels = ["shuffle"] + [f"p={params.success_probability(i):.6g}" for i in range(1, n + 1)]
    return ConcurrentGame.from_entries(n + 1, actions_p1, actions_p2, entries(), labels)
