"""Approximate Nash equilibria of bimatrix games under bit-metered communication."""

from .engine import ChannelPolicy, ProtocolOutcome, Transcript, replay, run_protocol
from .game import BimatrixGame, MixedStrategy, RegretReport, Role, StrategyProfile, regret_report
from .protocols import ALPHA_NE, ALPHA_WSNE, PROTOCOLS, ProtocolParams
from .zerosum import ZeroSumSolution, solve_zero_sum

__all__ = [
    "ALPHA_NE", "ALPHA_WSNE", "PROTOCOLS", "BimatrixGame", "ChannelPolicy", "MixedStrategy",
    "ProtocolOutcome", "ProtocolParams", "RegretReport", "Role", "StrategyProfile", "Transcript",
    "ZeroSumSolution", "regret_report", "replay", "run_protocol", "solve_zero_sum",
]
