import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_game, random_strategy
from ergodic_games import cli, io
from ergodic_games.game import GameFormatError
from ergodic_games.models import gen_rps


def games_equal(a, b):
    if (a.actions_p1, a.actions_p2, a.state_labels) != (b.actions_p1, b.actions_p2, b.state_labels):
        return False
    return list(a.entries()) == list(b.entries())


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_game_round_trip_bit_exact(seed, n, tmp_path_factory):
    rng = np.random.default_rng(seed)
    g = random_game(rng, n, dense=bool(rng.integers(2)))
    path = tmp_path_factory.mktemp("rt") / "g.json"
    io.write_game(g, path)
    h = io.read_game(path)
    assert games_equal(g, h)
    for a, b in zip(g.states, h.states):
        assert a.prob.tobytes() == b.prob.tobytes()
        assert np.array_equal(a.reward, b.reward)


def test_strategy_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    g = random_game(rng, 3)
    s = random_strategy(rng, g, 2)
    io.write_strategy(g, s, tmp_path / "s.json")
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["labels"] == [list(a) for a in g.actions_p2]
    assert io.read_strategy(tmp_path / "s.json") == s


@pytest.mark.parametrize(
    "doc, where",
    [
        ([], "top level"),
        ({"n_states": 1}, "actions_p1"),
        ({"n_states": 1, "actions_p1": [["a"]], "actions_p2": [["b"]], "entries": [{"s": 0}]}, "entries[0]"),
        (
            {"n_states": 1, "actions_p1": [["a"]], "actions_p2": [["b"]],
             "entries": [{"s": 0, "a1": 0, "a2": 0, "reward": 1, "dist": [[0]]}]},
            "dist[0]",
        ),
        ({"n_states": 1, "actions_p1": [["a", "c"]], "actions_p2": [["b"]],
          "entries": [{"s": 0, "a1": 0, "a2": 0, "reward": 1, "dist": [[0, 1.0]]}]}, "no entry"),
    ],
)
def test_parse_errors_name_location(doc, where):
    with pytest.raises(GameFormatError, match=where.replace("[", r"\[").replace("]", r"\]")):
        io.game_from_dict(doc)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_generate_examples(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", "bw", "--n", 10, "-o", tmp_path / "bw.json")
    assert code == 0 and "states: 100" in out
    code, out, _ = run(capsys, "generate", "ds", "--n", 5, "-o", tmp_path / "ds.json")
    assert code == 0 and "states: 6" in out
    code, out, _ = run(capsys, "generate", "rps", "--noise", 0.1, "--symmetric", "-o", tmp_path / "rps.json")
    assert code == 0 and "states: 5" in out
    assert io.read_game(tmp_path / "rps.json").n_states == 5


def test_generate_round_trip_equals_memory(tmp_path, capsys):
    run(capsys, "generate", "rps", "--noise", 0.1, "-o", tmp_path / "rps.json")
    assert games_equal(io.read_game(tmp_path / "rps.json"), gen_rps(0.1))


def test_solve_constant_game(tmp_path, capsys):
    entries = [{"s": s, "a1": a, "a2": 0, "reward": 3.7, "dist": [[0, 0.5], [1, 0.5]]} for s in range(2) for a in range(2)]
    doc = {"n_states": 2, "actions_p1": [["u", "d"]] * 2, "actions_p2": [["x"]] * 2, "entries": entries}
    (tmp_path / "c.json").write_text(json.dumps(doc))
    code, out, err = run(capsys, "solve", tmp_path / "c.json")
    assert code == 0
    assert out.splitlines()[0] == "value ∈ [3.7, 3.7]"
    assert "time:" in err


def test_solve_json_schema(tmp_path, capsys):
    run(capsys, "generate", "rps", "--symmetric", "-o", tmp_path / "g.json")
    code, out, _ = run(capsys, "solve", tmp_path / "g.json", "--json")
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {
        "lower", "upper", "epsilon", "gap", "midpoint", "termination", "iterations",
        "iterations_p1", "iterations_p2", "trace_p1", "trace_p2", "strategy_p1", "strategy_p2",
    }
    assert -0.01 <= doc["lower"] <= doc["upper"] <= 0.01
    assert doc["strategy_p1"]["player"] == 1 and len(doc["strategy_p1"]["probs"]) == 5


def test_solve_then_simulate(tmp_path, capsys):
    run(capsys, "generate", "rps", "-o", tmp_path / "g.json")
    code, out, _ = run(capsys, "solve", tmp_path / "g.json", "--json",
                       "--out-p1", tmp_path / "s1.json", "--out-p2", tmp_path / "s2.json")
    mid = json.loads(out)["midpoint"]
    code, out, _ = run(capsys, "simulate", tmp_path / "g.json", tmp_path / "s1.json", tmp_path / "s2.json",
                       "--steps", 20000, "--json")
    res = json.loads(out)
    assert code == 0
    assert set(res) >= {"mean_payoff_estimate", "half_width_95", "steps", "batches", "seed", "rng"}
    assert abs(res["mean_payoff_estimate"] - mid) <= res["half_width_95"] + 0.01


def test_simulate_mismatch_names_state(tmp_path, capsys):
    run(capsys, "generate", "rps", "-o", tmp_path / "g.json")
    bad = {"player": 1, "probs": [[1.0, 0.0, 0.0]] * 4 + [[1.0]], "labels": []}
    (tmp_path / "s1.json").write_text(json.dumps(bad))
    good = {"player": 2, "probs": [[1 / 3] * 3] * 5}
    (tmp_path / "s2.json").write_text(json.dumps(good))
    code, _, err = run(capsys, "simulate", tmp_path / "g.json", tmp_path / "s1.json", tmp_path / "s2.json")
    assert code == cli.EXIT_DATA and "state 4" in err


def test_exit_codes(tmp_path, capsys):
    assert run(capsys, "solve")[0] == cli.EXIT_USAGE
    assert run(capsys, "generate", "bw", "--n", 1, "-o", tmp_path / "x.json")[0] == cli.EXIT_USAGE
    (tmp_path / "bad.json").write_text("{\"n_states\": 1,\n")
    code, _, err = run(capsys, "solve", tmp_path / "bad.json")
    assert code == cli.EXIT_DATA and "line 2" in err
    noisy = random_game(np.random.default_rng(4), 4)
    io.write_game(noisy, tmp_path / "r.json")
    code, _, _ = run(capsys, "solve", tmp_path / "r.json", "--epsilon", 1e-15, "--max-iters", 1)
    assert code in (cli.EXIT_STALLED, cli.EXIT_MAX_ITERS)


def test_non_ergodic_is_data_error(tmp_path, capsys):
    doc = {"n_states": 2, "actions_p1": [["a"]] * 2, "actions_p2": [["b"]] * 2, "entries": [
        {"s": 0, "a1": 0, "a2": 0, "reward": 1.0, "dist": [[0, 1.0]]},
        {"s": 1, "a1": 0, "a2": 0, "reward": 0.0, "dist": [[1, 1.0]]},
    ]}
    (tmp_path / "n.json").write_text(json.dumps(doc))
    code, _, err = run(capsys, "solve", tmp_path / "n.json")
    assert code == cli.EXIT_DATA and "ergodic" in err


def test_validate_command(tmp_path, capsys):
    doc = {"n_states": 1, "actions_p1": [["a"]], "actions_p2": [["b"]],
           "entries": [{"s": 0, "a1": 0, "a2": 0, "reward": 0.0, "dist": [[0, 0.9]]}]}
    (tmp_path / "v.json").write_text(json.dumps(doc))
    code, out, _ = run(capsys, "validate", tmp_path / "v.json")
    assert code == cli.EXIT_DATA and "distribution mass 0.9" in out


def test_experiment_table_and_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "experiment", "ds", "--sizes", 30, 20, "--csv", tmp_path / "t.csv")
    lines = out.splitlines()
    assert code == 0 and lines[0].split()[:4] == ["#T", "States", "#SI", "Time"]
    assert [int(l.split()[1]) for l in lines[1:]] == [20, 30]
    rows = (tmp_path / "t.csv").read_text().splitlines()
    assert rows[0].startswith("transitions,states,iterations,seconds")
    assert len(rows) == 3


def test_experiment_row_failure_recorded(capsys):
    code, out, _ = run(capsys, "experiment", "bw", "--sizes", 1, 2)
    assert code == 0
    assert "error" in out and "converged" in out
