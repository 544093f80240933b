"""Command-line interface: ``ergodic-games {generate,solve,simulate,experiment,validate}``.

Exit codes: 0 converged (or success), 2 stalled, 3 iteration limit reached,
64 usage error, 65 malformed or unusable input data.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from . import io
from .game import ConcurrentGame, GameFormatError, ergodic_sufficient, validate, validate_strategy
from .models import (
    BlockWithholdingParams,
    DoubleSpendParams,
    ProofOfStakeParams,
    gen_block_withholding,
    gen_double_spend,
    gen_proof_of_stake,
    gen_rps,
)
from .simulate import simulate_profile
from .solver import NonErgodicError, SolveReport, solve

EXIT_OK = 0
EXIT_STALLED = 2
EXIT_MAX_ITERS = 3
EXIT_USAGE = 64
EXIT_DATA = 65

TERMINATION_CODES = {"converged": EXIT_OK, "stalled": EXIT_STALLED, "max-iters": EXIT_MAX_ITERS}

# sizes of the rows of the published results table
TABLE_SIZES = {
    "bw": [10, 14, 17, 20, 22, 24, 26, 28, 30],
    "ds": list(range(100, 1000, 100)),
    "pos": [3, 5, 6, 7, 9, 11, 13, 16],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def build_model(model: str, args: argparse.Namespace) -> ConcurrentGame:
    """Instantiate a generator from parsed ``generate`` options."""
    try:
        if model == "bw":
            return gen_block_withholding(BlockWithholdingParams(n=args.n))
        if model == "ds":
            return gen_double_spend(
                DoubleSpendParams(
                    n=args.n,
                    p_dc=args.p_dc,
                    profit=args.profit,
                    impatient=args.impatient,
                    max_attack=args.max_attack,
                )
            )
        if model == "pos":
            return gen_proof_of_stake(ProofOfStakeParams(n=args.n, p_step=args.p_step))
        return gen_rps(args.noise, symmetric=args.symmetric)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def model_for_size(model: str, size: int, p_step: float) -> ConcurrentGame:
    """Game for one experiment row. For ``ds`` the size is the state count."""
    if model == "bw":
        return gen_block_withholding(BlockWithholdingParams(n=size))
    if model == "ds":
        return gen_double_spend(DoubleSpendParams(n=size - 1))
    if model == "pos":
        return gen_proof_of_stake(ProofOfStakeParams(n=size, p_step=p_step))
    raise ValueError(f"unknown model {model!r}")


def _strategy_lines(game: ConcurrentGame, strat) -> list[str]:
    labels = game.actions_p1 if strat.player == 1 else game.actions_p2
    lines = []
    for s, p in enumerate(strat.probs):
        name = f" {game.state_labels[s]}" if game.state_labels else ""
        moves = " ".join(f"{labels[s][a]}:{_fmt(q)}" for a, q in enumerate(p) if q > 0)
        lines.append(f"  {s}{name} -> {moves}")
    return lines


def report_text(game: ConcurrentGame, report: SolveReport) -> str:
    out = [
        f"value ∈ [{_fmt(report.lower)}, {_fmt(report.upper)}]",
        f"epsilon: {_fmt(report.epsilon_requested)}  gap: {_fmt(report.gap)}",
        f"termination: {report.termination}",
        f"#SI: {report.iterations} (player 1: {report.iterations_p1}, player 2: {report.iterations_p2})",
        "strategy player 1:",
        *_strategy_lines(game, report.strategy_p1),
        "strategy player 2:",
        *_strategy_lines(game, report.strategy_p2),
    ]
    return "\n".join(out) + "\n"


def report_json(game: ConcurrentGame, report: SolveReport) -> str:
    doc = {
        "lower": report.lower,
        "upper": report.upper,
        "epsilon": report.epsilon_requested,
        "gap": report.gap,
        "midpoint": report.midpoint,
        "termination": report.termination,
        "iterations": report.iterations,
        "iterations_p1": report.iterations_p1,
        "iterations_p2": report.iterations_p2,
        "trace_p1": report.trace_p1,
        "trace_p2": report.trace_p2,
        "strategy_p1": io.strategy_to_dict(game, report.strategy_p1),
        "strategy_p2": io.strategy_to_dict(game, report.strategy_p2),
    }
    return json.dumps(doc, indent=1) + "\n"


def cmd_generate(args) -> int:
    game = build_model(args.model, args)
    io.write_game(game, args.out)
    print(f"states: {game.n_states}")
    print(f"transitions: {game.n_transitions}")
    return EXIT_OK


def cmd_validate(args) -> int:
    game = io.read_game(args.game)
    problems = validate(game)
    for p in problems:
        print(p)
    if problems:
        print(f"{len(problems)} violation(s)")
        return EXIT_DATA
    print(f"valid: {game.n_states} states, {game.n_transitions} transitions")
    print(f"ergodic (sufficient test): {'yes' if ergodic_sufficient(game) else 'inconclusive'}")
    return EXIT_OK


def _load_valid_game(path) -> ConcurrentGame:
    game = io.read_game(path)
    problems = validate(game)
    if problems:
        raise GameFormatError(f"{path}: " + "; ".join(problems[:5]))
    return game


def cmd_solve(args) -> int:
    game = _load_valid_game(args.game)
    report = solve(
        game,
        epsilon=args.epsilon,
        target=args.target,
        max_iters=args.max_iters,
        seed=args.seed,
        check_ergodic=not args.no_ergodic_check,
    )
    sys.stdout.write(report_json(game, report) if args.json else report_text(game, report))
    print(f"time: {report.wall_time:.3f} s", file=sys.stderr)
    if args.out_p1:
        io.write_strategy(game, report.strategy_p1, args.out_p1)
    if args.out_p2:
        io.write_strategy(game, report.strategy_p2, args.out_p2)
    return TERMINATION_CODES[report.termination]


def cmd_simulate(args) -> int:
    game = _load_valid_game(args.game)
    s1 = io.read_strategy(args.strategy_p1)
    s2 = io.read_strategy(args.strategy_p2)
    for strat, expected in ((s1, 1), (s2, 2)):
        if strat.player != expected:
            raise GameFormatError(f"strategy file for player {expected} belongs to player {strat.player}")
        problems = validate_strategy(game, strat)
        if problems:
            raise GameFormatError(f"player-{expected} strategy: " + "; ".join(problems[:5]))
    try:
        res = simulate_profile(game, s1, s2, start=args.start, steps=args.steps, batches=args.batches, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.json:
        print(json.dumps(asdict(res), indent=1))
    else:
        print(f"estimate: {_fmt(res.mean_payoff_estimate)} ± {_fmt(res.half_width_95)}")
        print(f"steps: {res.steps}  batches: {res.batches}  seed: {res.seed}  rng: {res.rng}")
    return EXIT_OK


@dataclass
class ExperimentRow:
    transitions: int
    states: int
    iterations: int
    seconds: float
    lower: float
    upper: float
    size: int
    termination: str = ""
    error: str = ""


def run_row(model: str, size: int, epsilon: float, p_step: float, max_iters: int) -> ExperimentRow:
    started = time.perf_counter()
    try:
        game = model_for_size(model, size, p_step)
        report = solve(game, epsilon=epsilon, max_iters=max_iters)
    except Exception as exc:  # noqa: BLE001 - failures are reported in the row
        return ExperimentRow(0, 0, 0, time.perf_counter() - started, float("nan"), float("nan"), size, "", str(exc))
    return ExperimentRow(
        transitions=game.n_transitions,
        states=game.n_states,
        iterations=report.iterations,
        seconds=time.perf_counter() - started,
        lower=report.lower,
        upper=report.upper,
        size=size,
        termination=report.termination,
    )


HEADER = ("#T", "States", "#SI", "Time", "Lower", "Upper", "Status")


def _row_cells(r: ExperimentRow) -> tuple[str, ...]:
    status = r.termination or f"error: {r.error}"
    return (
        str(r.transitions),
        str(r.states),
        str(r.iterations),
        f"{r.seconds:.1f}",
        f"{r.lower:.6f}",
        f"{r.upper:.6f}",
        status,
    )


def format_table(rows: list[ExperimentRow]) -> str:
    cells = [HEADER] + [_row_cells(r) for r in rows]
    widths = [max(len(c[k]) for c in cells) for k in range(len(HEADER))]
    lines = ["  ".join(c[k].rjust(widths[k]) for k in range(len(HEADER))).rstrip() for c in cells]
    return "\n".join(lines) + "\n"


def cmd_experiment(args) -> int:
    sizes = args.sizes or TABLE_SIZES[args.model]
    job = (args.epsilon, args.p_step, args.max_iters)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(run_row, [args.model] * len(sizes), sizes, *[[v] * len(sizes) for v in job]))
    else:
        rows = []
        for size in sizes:
            rows.append(run_row(args.model, size, *job))
            logging.getLogger(__name__).info("row %s done", size)
    rows.sort(key=lambda r: (r.states, r.size))
    sys.stdout.write(format_table(rows))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["transitions", "states", "iterations", "seconds", "lower", "upper", "termination", "error"])
            for r in rows:
                w.writerow([r.transitions, r.states, r.iterations, f"{r.seconds:.3f}", repr(r.lower), repr(r.upper), r.termination, r.error])
    return EXIT_OK


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ergodic-games", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="write a model game to a JSON file")
    gen.add_argument("model", choices=["bw", "ds", "pos", "rps"])
    gen.add_argument("-o", "--out", required=True, help="output game file")
    gen.add_argument("--n", type=int, default=None, help="grid size (bw, pos) or non-shuffling states (ds)")
    gen.add_argument("--p-dc", type=float, default=0.001)
    gen.add_argument("--profit", type=float, default=0.5)
    gen.add_argument("--impatient", type=float, default=0.5)
    gen.add_argument("--max-attack", type=int, default=20)
    gen.add_argument("--p-step", type=float, default=0.01, help="connectivity grid step (pos)")
    gen.add_argument("--noise", type=float, default=0.1, help="connection-loss probability (rps)")
    gen.add_argument("--symmetric", action="store_true", help="antisymmetric rewards (rps)")
    gen.set_defaults(func=cmd_generate)

    val = sub.add_parser("validate", help="check a game file")
    val.add_argument("game")
    val.set_defaults(func=cmd_validate)

    sol = sub.add_parser("solve", help="approximate the value of a game")
    sol.add_argument("game")
    sol.add_argument("--epsilon", type=_positive_float, default=0.01)
    sol.add_argument("--target", type=int, default=0, help="state whose potential is fixed to 0")
    sol.add_argument("--max-iters", type=int, default=100)
    sol.add_argument("--seed", type=int, default=None, help="random initial strategies")
    sol.add_argument("--json", action="store_true")
    sol.add_argument("--no-ergodic-check", action="store_true", help="skip the sufficient ergodicity test")
    sol.add_argument("--out-p1", help="write player-1 strategy JSON here")
    sol.add_argument("--out-p2", help="write player-2 strategy JSON here")
    sol.set_defaults(func=cmd_solve)

    sim = sub.add_parser("simulate", help="Monte-Carlo estimate of a strategy profile")
    sim.add_argument("game")
    sim.add_argument("strategy_p1")
    sim.add_argument("strategy_p2")
    sim.add_argument("--steps", type=int, default=100_000)
    sim.add_argument("--batches", type=int, default=32)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--start", type=int, default=0)
    sim.add_argument("--json", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    exp = sub.add_parser("experiment", help="solve a sweep of model sizes into a table")
    exp.add_argument("model", choices=["bw", "ds", "pos"])
    exp.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        help="grid sizes n for bw/pos, state counts for ds (default: the published table rows)",
    )
    exp.add_argument("--n", type=int, dest="single", help="shorthand for a single size")
    exp.add_argument("--epsilon", type=_positive_float, default=0.01)
    exp.add_argument("--p-step", type=float, default=0.1, help="connectivity grid step (pos)")
    exp.add_argument("--max-iters", type=int, default=100)
    exp.add_argument("--csv", help="also write the rows as CSV")
    exp.add_argument("--jobs", type=int, default=1, help="rows solved in parallel processes")
    exp.set_defaults(func=cmd_experiment)
    return parser


_DEFAULT_N = {"bw": 10, "ds": 99, "pos": 3}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.command == "generate" and args.n is None:
        args.n = _DEFAULT_N.get(args.model)
    if args.command == "experiment" and args.single is not None:
        args.sizes = (args.sizes or []) + [args.single]
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ergodic-games: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GameFormatError, NonErgodicError) as exc:
        print(f"ergodic-games: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"ergodic-games: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
