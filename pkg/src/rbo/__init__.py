"""Bit-reversal broadcast scheduling: cycles, receivers, wake-up timing and
energy simulation."""

from .bitrev import Progression, Segment, decompose, descendant, level, reverse_bits, subtree, trailing_zero_run
from .nsi import nsi_fast, nsi_oracle
from .receiver import LOSS, QueryInterval, ReceiverState, start
from .schedule import BroadcastCycle, Frame, build_cycle
from .sim import ChannelModel, EnergyStats, SessionConfig, run_monte_carlo, run_session

__all__ = [
    "BroadcastCycle", "ChannelModel", "EnergyStats", "Frame", "LOSS", "Progression",
    "QueryInterval", "ReceiverState", "Segment", "SessionConfig", "build_cycle",
    "decompose", "descendant", "level", "nsi_fast", "nsi_oracle", "reverse_bits",
    "run_monte_carlo", "run_session", "start", "subtree", "trailing_zero_run",
]
