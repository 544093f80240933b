"""Concurrent stochastic game structures and stationary strategies.

A game is stored per state: a dense reward matrix of shape ``(m1, m2)`` and a
sparse transition table in CSR-like form (``pair``, ``succ``, ``prob``), where
``pair = a1 * m2 + a2`` names the joint action that produces the entry.
Missing entries are kept as NaN rewards / empty supports so that
:func:`validate` can report them instead of failing at construction.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9


class GameFormatError(ValueError):
    """Raised when game data cannot be stored at all (bad indices, duplicates)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StateTable:
    """Rewards and sparse transitions of a single state."""

    reward: np.ndarray  # (m1, m2), NaN where undefined
    pair: np.ndarray  # int64, joint-action index a1 * m2 + a2
    succ: np.ndarray  # int64, successor state
    prob: np.ndarray  # float64

    @property
    def shape(self) -> tuple[int, int]:
        return self.reward.shape  # type: ignore[return-value]

    def expected_next(self, values: np.ndarray) -> np.ndarray:
        """Matrix of ``sum_s' delta(s, a1, a2)(s') * values[s']`` over joint actions."""
        m1, m2 = self.reward.shape
        flat = np.bincount(self.pair, weights=self.prob * values[self.succ], minlength=m1 * m2)
        return flat.reshape(m1, m2)

    def mass(self) -> np.ndarray:
        m1, m2 = self.reward.shape
        return np.bincount(self.pair, weights=self.prob, minlength=m1 * m2).reshape(m1, m2)


@dataclass(frozen=True)
class ConcurrentGame:
    """Finite two-player concurrent game with a reward for player 1.

    Player 1 maximizes the long-run average reward, player 2 minimizes it.
    Use :meth:`from_entries` or :meth:`from_arrays` to build one.
    """

    actions_p1: tuple[tuple[str, ...], ...]
    actions_p2: tuple[tuple[str, ...], ...]
    states: tuple[StateTable, ...]
    state_labels: tuple[str, ...] = field(default=())

    @property
    def n_states(self) -> int:
        return len(self.states)

    def n_actions(self, player: int, s: int) -> int:
        return len(self.actions_p1[s] if player == 1 else self.actions_p2[s])

    def reward(self, s: int, a1: int, a2: int) -> float:
        return float(self.states[s].reward[a1, a2])

    def distribution(self, s: int, a1: int, a2: int) -> dict[int, float]:
        """Successor distribution of ``(s, a1, a2)`` as ``{state: prob}``."""
        st = self.states[s]
        sel = st.pair == a1 * st.reward.shape[1] + a2
        out: dict[int, float] = {}
        for t, p in zip(st.succ[sel].tolist(), st.prob[sel].tolist()):
            out[t] = out.get(t, 0.0) + p
        return out

    @property
    def n_transitions(self) -> int:
        """Size of the transition relation, the sum of all support sizes."""
        total = 0
        for st in self.states:
            keep = st.prob > 0
            total += len(np.unique(st.pair[keep] * self.n_states + st.succ[keep]))
        return total

    @property
    def max_actions(self) -> int:
        return max(max(len(a) for a in self.actions_p1), max(len(a) for a in self.actions_p2))

    @classmethod
    def from_entries(
        cls,
        n_states: int,
        actions_p1: Sequence[Sequence[str]],
        actions_p2: Sequence[Sequence[str]],
        entries: Iterable[tuple[int, int, int, float, Iterable[tuple[int, float]]]],
        state_labels: Sequence[str] | None = None,
    ) -> ConcurrentGame:
        """Build a game from ``(s, a1, a2, reward, [(s', p), ...])`` records.

        Raises GameFormatError for indices outside the declared ranges and for
        duplicated ``(s, a1, a2)`` triples; every other defect is left for
        :func:`validate`.
        """
        if len(actions_p1) != n_states or len(actions_p2) != n_states:
            raise GameFormatError(
                f"action lists cover {len(actions_p1)}/{len(actions_p2)} states, expected {n_states}"
            )
        rewards = [np.full((len(actions_p1[s]), len(actions_p2[s])), np.nan) for s in range(n_states)]
        seen = [np.zeros(r.shape, dtype=bool) for r in rewards]
        pairs: list[list[int]] = [[] for _ in range(n_states)]
        succs: list[list[int]] = [[] for _ in range(n_states)]
        probs: list[list[float]] = [[] for _ in range(n_states)]
        for k, (s, a1, a2, r, dist) in enumerate(entries):
            if not 0 <= s < n_states:
                raise GameFormatError(f"entry {k}: state {s} out of range")
            m1, m2 = rewards[s].shape
            if not (0 <= a1 < m1 and 0 <= a2 < m2):
                raise GameFormatError(f"entry {k}: action pair ({a1}, {a2}) out of range at state {s}")
            if seen[s][a1, a2]:
                raise GameFormatError(f"entry {k}: duplicate triple ({s}, {a1}, {a2})")
            seen[s][a1, a2] = True
            rewards[s][a1, a2] = float(r)
            for t, p in dist:
                pairs[s].append(a1 * m2 + a2)
                succs[s].append(int(t))
                probs[s].append(float(p))
        tables = tuple(
            StateTable(
                reward=_frozen(rewards[s]),
                pair=_frozen(np.asarray(pairs[s], dtype=np.int64)),
                succ=_frozen(np.asarray(succs[s], dtype=np.int64)),
                prob=_frozen(np.asarray(probs[s], dtype=np.float64)),
            )
            for s in range(n_states)
        )
        return cls(
            actions_p1=tuple(tuple(a) for a in actions_p1),
            actions_p2=tuple(tuple(a) for a in actions_p2),
            states=tables,
            state_labels=tuple(state_labels) if state_labels is not None else (),
        )

    @classmethod
    def from_arrays(
        cls,
        rewards: Sequence[np.ndarray],
        transitions: Sequence[np.ndarray],
        actions_p1: Sequence[Sequence[str]] | None = None,
        actions_p2: Sequence[Sequence[str]] | None = None,
        state_labels: Sequence[str] | None = None,
    ) -> ConcurrentGame:
        """Build a game from dense per-state arrays.

        ``rewards[s]`` has shape ``(m1, m2)`` and ``transitions[s]`` shape
        ``(m1, m2, n_states)``; zero probabilities are dropped.
        """
        n = len(rewards)
        if actions_p1 is None:
            actions_p1 = [[str(a) for a in range(np.shape(rewards[s])[0])] for s in range(n)]
        if actions_p2 is None:
            actions_p2 = [[str(a) for a in range(np.shape(rewards[s])[1])] for s in range(n)]

        def entries():
            for s in range(n):
                R = np.asarray(rewards[s], dtype=float)
                T = np.asarray(transitions[s], dtype=float)
                for a1 in range(R.shape[0]):
                    for a2 in range(R.shape[1]):
                        row = T[a1, a2]
                        nz = np.flatnonzero(row)
                        yield s, a1, a2, R[a1, a2], zip(nz.tolist(), row[nz].tolist())

        return cls.from_entries(n, actions_p1, actions_p2, entries(), state_labels)

    def entries(self):
        """Yield ``(s, a1, a2, reward, [(s', p), ...])`` in row-major order."""
        for s, st in enumerate(self.states):
            m1, m2 = st.reward.shape
            order = np.argsort(st.pair, kind="stable")
            pair, succ, prob = st.pair[order], st.succ[order], st.prob[order]
            bounds = np.searchsorted(pair, np.arange(m1 * m2 + 1))
            for k in range(m1 * m2):
                lo, hi = bounds[k], bounds[k + 1]
                a1, a2 = divmod(k, m2)
                if math.isnan(st.reward[a1, a2]) and lo == hi:
                    continue
                dist = list(zip(succ[lo:hi].tolist(), prob[lo:hi].tolist()))
                yield s, a1, a2, float(st.reward[a1, a2]), dist


@dataclass(frozen=True)
class StationaryStrategy:
    """Per-state distributions over the owning player's actions."""

    player: int
    probs: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.player not in (1, 2):
            raise ValueError(f"player must be 1 or 2, got {self.player}")
        frozen = tuple(_frozen(np.array(p, dtype=np.float64)) for p in self.probs)
        object.__setattr__(self, "probs", frozen)

    def __getitem__(self, s: int) -> np.ndarray:
        return self.probs[s]

    def __len__(self) -> int:
        return len(self.probs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StationaryStrategy):
            return NotImplemented
        return (
            self.player == other.player
            and len(self.probs) == len(other.probs)
            and all(np.array_equal(a, b) for a, b in zip(self.probs, other.probs))
        )

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def pure(cls, game: ConcurrentGame, player: int, choice: Sequence[int]) -> StationaryStrategy:
        probs = []
        for s, a in enumerate(choice):
            p = np.zeros(game.n_actions(player, s))
            p[a] = 1.0
            probs.append(p)
        return cls(player, tuple(probs))


def validate(game: ConcurrentGame) -> list[str]:
    """Return every structural violation of ``game``; empty means well-formed."""
    problems: list[str] = []
    n = game.n_states
    if n < 1:
        problems.append("game has no states")
    for s, st in enumerate(game.states):
        m1, m2 = st.reward.shape
        if m1 < 1:
            problems.append(f"state {s}: player 1 has no actions")
        if m2 < 1:
            problems.append(f"state {s}: player 2 has no actions")
        if m1 < 1 or m2 < 1:
            continue
        bad_succ = (st.succ < 0) | (st.succ >= n)
        for k in np.flatnonzero(bad_succ):
            a1, a2 = divmod(int(st.pair[k]), m2)
            problems.append(f"state {s}, actions ({a1}, {a2}): successor {int(st.succ[k])} out of range")
        bad_p = ~np.isfinite(st.prob) | (st.prob < 0.0) | (st.prob > 1.0)
        for k in np.flatnonzero(bad_p):
            a1, a2 = divmod(int(st.pair[k]), m2)
            problems.append(f"state {s}, actions ({a1}, {a2}): probability {st.prob[k]!r} outside [0, 1]")
        mass = st.mass()
        has_dist = np.bincount(st.pair, minlength=m1 * m2).reshape(m1, m2) > 0
        for a1 in range(m1):
            for a2 in range(m2):
                r = st.reward[a1, a2]
                if not has_dist[a1, a2]:
                    problems.append(f"state {s}, actions ({a1}, {a2}): transition undefined")
                elif abs(mass[a1, a2] - 1.0) > PROB_TOL:
                    problems.append(
                        f"state {s}, actions ({a1}, {a2}): distribution mass {mass[a1, a2]:.12g} != 1"
                    )
                if math.isnan(r):
                    problems.append(f"state {s}, actions ({a1}, {a2}): reward undefined")
                elif not math.isfinite(r):
                    problems.append(f"state {s}, actions ({a1}, {a2}): reward {r!r} not finite")
    return problems


def validate_strategy(game: ConcurrentGame, strategy: StationaryStrategy) -> list[str]:
    """Return the violations of ``strategy`` as a stationary strategy of ``game``."""
    problems: list[str] = []
    if len(strategy.probs) != game.n_states:
        return [f"strategy covers {len(strategy.probs)} states, game has {game.n_states}"]
    for s, p in enumerate(strategy.probs):
        m = game.n_actions(strategy.player, s)
        if p.shape != (m,):
            problems.append(f"state {s}: {p.size} probabilities for {m} actions of player {strategy.player}")
            continue
        if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            problems.append(f"state {s}: probabilities outside [0, 1]")
        if abs(p.sum() - 1.0) > PROB_TOL:
            problems.append(f"state {s}: probabilities sum to {p.sum():.12g}")
    return problems


def uniform_strategy(game: ConcurrentGame, player: int) -> StationaryStrategy:
    """Uniform distribution over the player's actions at every state."""
    return StationaryStrategy(
        player,
        tuple(np.full(m, 1.0 / m) for m in (game.n_actions(player, s) for s in range(game.n_states))),
    )


def universal_successors(game: ConcurrentGame) -> list[np.ndarray]:
    """For each state, the successors reached under every joint action."""
    out = []
    for st in game.states:
        m1, m2 = st.reward.shape
        keep = st.prob > 0
        pair, succ = st.pair[keep], st.succ[keep]
        counts = np.zeros(game.n_states, dtype=np.int64)
        # one vote per (pair, successor) even if the successor is listed twice
        uniq = np.unique(pair * game.n_states + succ)
        np.add.at(counts, uniq % game.n_states, 1)
        out.append(np.flatnonzero(counts == m1 * m2))
    return out


def ergodic_sufficient(game: ConcurrentGame) -> bool:
    """Sufficient test for ergodicity.

    Builds the graph with an edge ``s -> s'`` whenever ``s'`` is in the support
    of ``delta(s, a1, a2)`` for every joint action at ``s`` and checks that it
    is strongly connected. ``False`` is inconclusive.
    """
    n = game.n_states
    if n == 0:
        return False
    forward = universal_successors(game)
    backward: list[list[int]] = [[] for _ in range(n)]
    for s, succ in enumerate(forward):
        for t in succ.tolist():
            backward[t].append(s)

    def reaches_all(adj) -> bool:
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())

    return reaches_all([f.tolist() for f in forward]) and reaches_all(backward)
