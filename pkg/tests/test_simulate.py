import numpy as np
import pytest

from conftest import random_game, random_strategy
from oracles import stationary_mean
from ergodic_games.game import ConcurrentGame, StationaryStrategy, uniform_strategy
from ergodic_games.simulate import simulate_profile


def profile(game):
    return uniform_strategy(game, 1), uniform_strategy(game, 2)


def test_constant_reward_exact():
    g = ConcurrentGame.from_entries(
        2, [["a", "b"]] * 2, [["x"]] * 2,
        [(s, a, 0, 2.5, [(0, 0.3), (1, 0.7)]) for s in range(2) for a in range(2)],
    )
    res = simulate_profile(g, *profile(g), steps=1000, seed=1)
    assert res.mean_payoff_estimate == 2.5
    assert res.half_width_95 == 0.0


def test_deterministic_cycle_even_steps():
    g = ConcurrentGame.from_entries(
        2, [["a"]] * 2, [["b"]] * 2, [(0, 0, 0, 0.0, [(1, 1.0)]), (1, 0, 0, 2.0, [(0, 1.0)])]
    )
    res = simulate_profile(g, *profile(g), steps=1000, batches=4, seed=0)
    assert res.mean_payoff_estimate == 1.0 and res.half_width_95 == 0.0


def test_seed_determinism_and_sensitivity():
    g = random_game(np.random.default_rng(1), 3)
    s1, s2 = profile(g)
    a = simulate_profile(g, s1, s2, steps=5000, seed=9)
    b = simulate_profile(g, s1, s2, steps=5000, seed=9)
    c = simulate_profile(g, s1, s2, steps=5000, seed=10)
    assert a == b
    assert a.batch_means != c.batch_means
    assert a.rng.startswith("numpy-PCG64")


def test_hand_solvable_chain():
    # two-state chain: 0 -> 1 w.p. 1/4, 1 -> 0 w.p. 1/2; stationary (2/3, 1/3)
    g = ConcurrentGame.from_entries(
        2, [["a"]] * 2, [["b"]] * 2,
        [(0, 0, 0, 3.0, [(0, 0.75), (1, 0.25)]), (1, 0, 0, -3.0, [(0, 0.5), (1, 0.5)])],
    )
    res = simulate_profile(g, *profile(g), steps=1_000_000 // 32, seed=4)
    assert abs(res.mean_payoff_estimate - 1.0) <= 3 * res.half_width_95
    assert res.half_width_95 > 0


def test_start_states_agree():
    rng = np.random.default_rng(8)
    g = random_game(rng, 4)
    s1, s2 = random_strategy(rng, g, 1), random_strategy(rng, g, 2)
    a = simulate_profile(g, s1, s2, start=0, steps=20_000, seed=1)
    b = simulate_profile(g, s1, s2, start=3, steps=20_000, seed=2)
    assert abs(a.mean_payoff_estimate - b.mean_payoff_estimate) <= a.half_width_95 + b.half_width_95
    exact = stationary_mean(g, s1, s2)
    assert abs(a.mean_payoff_estimate - exact) <= 3 * a.half_width_95


def test_mixed_actions_sampled_with_right_frequency():
    # reward 1 only when player 1 plays its second action
    g = ConcurrentGame.from_entries(
        1, [["a", "b"]], [["x"]], [(0, 0, 0, 0.0, [(0, 1.0)]), (0, 1, 0, 1.0, [(0, 1.0)])]
    )
    s1 = StationaryStrategy(1, ([0.8, 0.2],))
    res = simulate_profile(g, s1, uniform_strategy(g, 2), steps=50_000, seed=3)
    assert abs(res.mean_payoff_estimate - 0.2) <= 3 * res.half_width_95


@pytest.mark.parametrize(
    "kwargs", [{"steps": 0}, {"batches": 1}, {"start": 7}]
)
def test_bad_arguments(kwargs):
    g = random_game(np.random.default_rng(0), 2)
    with pytest.raises(ValueError):
        simulate_profile(g, *profile(g), **kwargs)


def test_dimension_mismatch_names_state():
    g = random_game(np.random.default_rng(0), 2, max_actions=1)
    bad = StationaryStrategy(1, ([1.0], [0.5, 0.5]))
    with pytest.raises(ValueError, match="state 1"):
        simulate_profile(g, bad, uniform_strategy(g, 2))
