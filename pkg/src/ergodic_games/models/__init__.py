"""Generators for the attack games and the rock-paper-scissors fixtures."""

from .block_withholding import BlockWithholdingParams, gen_block_withholding, solve_attractiveness
from .double_spend import DoubleSpendParams, gen_double_spend
from .proof_of_stake import ProofOfStakeParams, gen_proof_of_stake, poisson_cdf
from .rps import gen_rps

__all__ = [
    "BlockWithholdingParams",
    "DoubleSpendParams",
    "ProofOfStakeParams",
    "gen_block_withholding",
    "gen_double_spend",
    "gen_proof_of_stake",
    "gen_rps",
    "poisson_cdf",
    "solve_attractiveness",
]
