"""Block-withholding attacks between two mining pools.

State ``(i1, i2)`` means pool A holds ``i1 * eps`` and pool B ``i2 * eps`` of
the hash power, ``eps = 1 / (2n + 1)``. Action ``k`` of a pool sends
``k * eps`` of its power to infiltrate the other pool. Player 1 is pool A
and the reward is A's revenue.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..game import ConcurrentGame
from .migration import joint_move


@dataclass(frozen=True)
class BlockWithholdingParams:
    n: int = 10

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")

    @property
    def eps(self) -> float:
        return 1.0 / (2 * self.n + 1)


def solve_attractiveness(alpha: float, beta: float, alpha_prime: float, beta_prime: float):
    """Revenues and attractiveness of pools A, B and the independent miners.

    Solves
        r_A = (alpha - alpha') + alpha' * r_B / (beta + alpha')
        r_B = (beta - beta') + beta' * r_A / (alpha + beta')
    and returns ``(r_A, r_B, attr_A, attr_B, attr_C)``.
    """
    if not (alpha > 0 and beta > 0 and alpha + beta <= 1 + 1e-12):
        raise ValueError(f"invalid pool sizes alpha={alpha}, beta={beta}")
    if not (0 <= alpha_prime < alpha and 0 <= beta_prime < beta):
        raise ValueError(f"infiltration ({alpha_prime}, {beta_prime}) exceeds pool size")
    ka = alpha_prime / (beta + alpha_prime)
    kb = beta_prime / (alpha + beta_prime)
    det = 1.0 - ka * kb
    assert det > 0.0, "attractiveness system is singular"
    ca, cb = alpha - alpha_prime, beta - beta_prime
    r_a = (ca + ka * cb) / det
    r_b = (cb + kb * ca) / det
    attr_a = r_a / (alpha + beta_prime)
    attr_b = r_b / (beta + alpha_prime)
    attr_c = 1.0 / (1.0 - alpha_prime - beta_prime)
    return r_a, r_b, attr_a, attr_b, attr_c


def state_index(i1: int, i2: int, n: int) -> int:
    return (i1 - 1) * n + (i2 - 1)


def gen_block_withholding(params: BlockWithholdingParams) -> ConcurrentGame:
    n, eps = params.n, params.eps
    states = [(i1, i2) for i1 in range(1, n + 1) for i2 in range(1, n + 1)]
    actions_p1 = [[f"attack-{k}eps" for k in range(i1)] for i1, _ in states]
    actions_p2 = [[f"attack-{k}eps" for k in range(i2)] for _, i2 in states]

    def entries():
        for s, (i1, i2) in enumerate(states):
            alpha, beta = i1 * eps, i2 * eps
            for k1 in range(i1):
                for k2 in range(i2):
                    r_a, _, attr_a, attr_b, _ = solve_attractiveness(alpha, beta, k1 * eps, k2 * eps)
                    moves = joint_move(i1, i2, n, attr_a, attr_b)
                    dist = [(state_index(a, b, n), p) for (a, b), p in sorted(moves.items())]
                    yield s, k1, k2, r_a, dist

    labels = [f"({i1},{i2})" for i1, i2 in states]
    return ConcurrentGame.from_entries(n * n, actions_p1, actions_p2, entries(), labels)
