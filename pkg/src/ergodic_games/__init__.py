"""Strategy iteration for ergodic concurrent mean-payoff games."""

from .evaluation import PotentialSolution, evaluate_strategy
from .game import (
    ConcurrentGame,
    GameFormatError,
    StationaryStrategy,
    ergodic_sufficient,
    uniform_strategy,
    validate,
)
from .matrix_game import MatrixGameSolution, solve_matrix_game, solve_refined
from .simulate import SimulationResult, simulate_profile
from .solver import NonErgodicError, SolveReport, solve

__all__ = [
    "ConcurrentGame",
    "GameFormatError",
    "MatrixGameSolution",
    "NonErgodicError",
    "PotentialSolution",
    "SimulationResult",
    "SolveReport",
    "StationaryStrategy",
    "ergodic_sufficient",
    "evaluate_strategy",
    "simulate_profile",
    "solve",
    "solve_matrix_game",
    "solve_refined",
    "uniform_strategy",
    "validate",
]
