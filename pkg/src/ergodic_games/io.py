"""JSON files for games and stationary strategies.

Game document::

    {"n_states": 2,
     "actions_p1": [["a"], ["a", "b"]], "actions_p2": [["x"], ["x"]],
     "state_labels": ["left", "right"],            # optional
     "entries": [{"s": 0, "a1": 0, "a2": 0, "reward": 1.0, "dist": [[1, 1.0]]}, ...]}

Strategy document::

    {"player": 1, "probs": [[1.0], [0.5, 0.5]], "labels": [["a"], ["a", "b"]]}

Floats are written with Python's shortest round-trip repr, so probabilities
survive a write/read cycle bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .game import ConcurrentGame, GameFormatError, StationaryStrategy


def game_to_dict(game: ConcurrentGame) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "n_states": game.n_states,
        "actions_p1": [list(a) for a in game.actions_p1],
        "actions_p2": [list(a) for a in game.actions_p2],
    }
    if game.state_labels:
        doc["state_labels"] = list(game.state_labels)
    doc["entries"] = [
        {"s": s, "a1": a1, "a2": a2, "reward": r, "dist": [[t, p] for t, p in dist]}
        for s, a1, a2, r, dist in game.entries()
    ]
    return doc


def _require(doc: dict, key: str, kind, where: str):
    if key not in doc:
        raise GameFormatError(f"{where}: missing field '{key}'")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise GameFormatError(f"{where}.{key}: expected {getattr(kind, '__name__', kind)}")
    return value


def _labels(doc: dict, key: str, n: int) -> list[list[str]]:
    rows = _require(doc, key, list, "game")
    if len(rows) != n:
        raise GameFormatError(f"game.{key}: {len(rows)} rows for {n} states")
    for s, row in enumerate(rows):
        if not isinstance(row, list) or not all(isinstance(a, str) for a in row):
            raise GameFormatError(f"game.{key}[{s}]: expected a list of strings")
    return rows


def game_from_dict(doc: Any) -> ConcurrentGame:
    """Parse a game document; errors name the offending field or entry."""
    if not isinstance(doc, dict):
        raise GameFormatError("game: top level must be an object")
    n = _require(doc, "n_states", int, "game")
    if n < 1:
        raise GameFormatError("game.n_states: must be positive")
    acts1 = _labels(doc, "actions_p1", n)
    acts2 = _labels(doc, "actions_p2", n)
    labels = doc.get("state_labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise GameFormatError("game.state_labels: expected one label per state")
    raw = _require(doc, "entries", list, "game")

    def records():
        for k, e in enumerate(raw):
            where = f"game.entries[{k}]"
            if not isinstance(e, dict):
                raise GameFormatError(f"{where}: expected an object")
            s = _require(e, "s", int, where)
            a1 = _require(e, "a1", int, where)
            a2 = _require(e, "a2", int, where)
            r = _require(e, "reward", (int, float), where)
            dist = _require(e, "dist", list, where)
            pairs = []
            for j, item in enumerate(dist):
                if (
                    not isinstance(item, list)
                    or len(item) != 2
                    or not isinstance(item[0], int)
                    or not isinstance(item[1], (int, float))
                ):
                    raise GameFormatError(f"{where}.dist[{j}]: expected [state, probability]")
                pairs.append((item[0], float(item[1])))
            yield s, a1, a2, float(r), pairs

    game = ConcurrentGame.from_entries(n, acts1, acts2, records(), labels)
    missing = sum(int(np.isnan(st.reward).sum()) for st in game.states)
    if missing:
        raise GameFormatError(f"game.entries: {missing} (state, a1, a2) triples have no entry")
    return game


def strategy_to_dict(game: ConcurrentGame, strategy: StationaryStrategy) -> dict[str, Any]:
    labels = game.actions_p1 if strategy.player == 1 else game.actions_p2
    return {
        "player": strategy.player,
        "probs": [p.tolist() for p in strategy.probs],
        "labels": [list(a) for a in labels],
    }


def strategy_from_dict(doc: Any) -> StationaryStrategy:
    if not isinstance(doc, dict):
        raise GameFormatError("strategy: top level must be an object")
    player = _require(doc, "player", int, "strategy")
    if player not in (1, 2):
        raise GameFormatError("strategy.player: must be 1 or 2")
    probs = _require(doc, "probs", list, "strategy")
    rows = []
    for s, row in enumerate(probs):
        if not isinstance(row, list) or not all(isinstance(p, (int, float)) for p in row):
            raise GameFormatError(f"strategy.probs[{s}]: expected a list of numbers")
        rows.append(np.asarray(row, dtype=np.float64))
    return StationaryStrategy(player, tuple(rows))


def _load(path: str | Path, what: str) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{path}: invalid {what} JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def read_game(path: str | Path) -> ConcurrentGame:
    return game_from_dict(_load(path, "game"))


def write_game(game: ConcurrentGame, path: str | Path) -> None:
    Path(path).write_text(json.dumps(game_to_dict(game), separators=(",", ":")) + "\n")


def read_strategy(path: str | Path) -> StationaryStrategy:
    return strategy_from_dict(_load(path, "strategy"))


def write_strategy(game: ConcurrentGame, strategy: StationaryStrategy, path: str | Path) -> None:
    Path(path).write_text(json.dumps(strategy_to_dict(game, strategy), indent=1) + "\n")
