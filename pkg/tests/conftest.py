import numpy as np
import pytest

from ergodic_games.game import ConcurrentGame, StationaryStrategy


def random_game(rng: np.random.Generator, n_states: int, max_actions: int = 3, dense: bool = True) -> ConcurrentGame:
    """Random game with rewards in [-1, 1].

    ``dense`` gives full-support transitions (ergodic by the universal-edge
    test); otherwise every entry keeps a random subset of successors plus a
    forced step ``s -> s+1`` so the cycle through all states survives.
    """
    acts1 = [[f"a{k}" for k in range(rng.integers(1, max_actions + 1))] for _ in range(n_states)]
    acts2 = [[f"b{k}" for k in range(rng.integers(1, max_actions + 1))] for _ in range(n_states)]
    entries = []
    for s in range(n_states):
        for a1 in range(len(acts1[s])):
            for a2 in range(len(acts2[s])):
                if dense:
                    support = np.arange(n_states)
                else:
                    keep = rng.random(n_states) < 0.5
                    keep[(s + 1) % n_states] = True
                    support = np.flatnonzero(keep)
                p = rng.dirichlet(np.ones(len(support)))
                entries.append((s, a1, a2, float(rng.uniform(-1, 1)), list(zip(support.tolist(), p.tolist()))))
    return ConcurrentGame.from_entries(n_states, acts1, acts2, entries)


def random_strategy(rng: np.random.Generator, game: ConcurrentGame, player: int) -> StationaryStrategy:
    acts = game.actions_p1 if player == 1 else game.actions_p2
    return StationaryStrategy(player, tuple(rng.dirichlet(np.ones(len(a))) for a in acts))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
