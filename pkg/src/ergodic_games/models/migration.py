"""Stochastic miner migration on a one-dimensional size grid."""

from __future__ import annotations

ATTRACTIVE = (2 / 3, 1 / 6, 1 / 6)  # gain, retain, lose
UNATTRACTIVE = (1 / 6, 1 / 6, 2 / 3)
TIE_TOL = 1e-12


def step_distribution(i: int, n: int, attractive: bool) -> dict[int, float]:
    """Next grid index of a pool at ``i`` in ``{1..n}``.

    A move that would leave the grid is turned into staying put.
    """
    gain, retain, lose = ATTRACTIVE if attractive else UNATTRACTIVE
    out = {i: retain}
    for j, p in ((i + 1, gain), (i - 1, lose)):
        k = j if 1 <= j <= n else i
        out[k] = out.get(k, 0.0) + p
    return out


def who_gains(attr_a: float, attr_b: float) -> tuple[bool, bool]:
    """Which of the two pools count as the most attractive; both on a tie."""
    if abs(attr_a - attr_b) <= TIE_TOL:
        return True, True
    return attr_a > attr_b, attr_b > attr_a


def joint_move(i: int, j: int, n: int, attr_a: float, attr_b: float) -> dict[tuple[int, int], float]:
    """Independent per-pool moves combined into one distribution over ``(i', j')``."""
    up_a, up_b = who_gains(attr_a, attr_b)
    da = step_distribution(i, n, up_a)
    db = step_distribution(j, n, up_b)
    return {(a, b): pa * pb for a, pa in da.items() for b, pb in db.items()}
