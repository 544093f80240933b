"""Repeated rock-paper-scissors played in laps, optionally over a lossy network.

State ``s`` in ``-2..2`` is player 1's lead in rounds within the current
lap; reaching a lead of 3 either way ends the lap and play restarts at 0.
With network noise ``eps`` a round is lost by a randomly chosen player
(each with probability ``eps / 2``) who failed to submit a move in time.
"""

from __future__ import annotations

from ..game import ConcurrentGame

MOVES = ("R", "P", "S")
STATES = (-2, -1, 0, 1, 2)


def round_winner(a1: int, a2: int) -> int:
    """+1 if player 1 wins the round, -1 if player 2 does, 0 on a tie."""
    if a1 == a2:
        return 0
    # rock beats scissors, scissors beat paper, paper beats rock
    return 1 if (a1 - a2) % 3 == 1 else -1


def _after(s: int, delta: int) -> int:
    t = s + delta
    return 0 if abs(t) == 3 else t


def gen_rps(epsilon_net: float = 0.1, symmetric: bool = False) -> ConcurrentGame:
    """Build the five-state game; ``epsilon_net = 0`` gives the noiseless variant.

    With ``symmetric=False`` the reward is 1 for a lap won by player 1 (1/2
    for a tie at state 2, which wins the lap half the time). With
    ``symmetric=True`` each step pays the expected lap outcome: +1 for a lap
    won by player 1 and -1 for a lap won by player 2.
    """
    if not 0 <= epsilon_net < 1:
        raise ValueError(f"noise must lie in [0, 1), got {epsilon_net}")

    def entries():
        for s_idx, s in enumerate(STATES):
            for a1 in range(3):
                for a2 in range(3):
                    w = round_winner(a1, a2)
                    p_up = 0.5 if w == 0 else float(w == 1)
                    up = (1 - epsilon_net) * p_up + epsilon_net / 2
                    down = (1 - epsilon_net) * (1 - p_up) + epsilon_net / 2
                    dist: dict[int, float] = {}
                    for t, q in ((_after(s, 1), up), (_after(s, -1), down)):
                        if q > 0:
                            dist[t + 2] = dist.get(t + 2, 0.0) + q
                    if symmetric:
                        reward = (up if s == 2 else 0.0) - (down if s == -2 else 0.0)
                    else:
                        reward = p_up if s == 2 else 0.0
                    yield s_idx, a1, a2, reward, sorted(dist.items())

    acts = [list(MOVES)] * 5
    return ConcurrentGame.from_entries(5, acts, acts, entries(), [str(s) for s in STATES])
