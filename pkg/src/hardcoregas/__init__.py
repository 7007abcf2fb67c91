"""Samplers and verification tools for the hard-core gas point process.

Exact sampling by rejection and by dominated coupling from the past, a
spatial birth-death chain simulator, clan-of-descendants extinction
experiments, and numeric checks of the drift analysis that bounds the
sampler's running time.
"""

from .geometry import Configuration, CoverageProfile, Point
from .poisson import AttemptsExhausted, ModelParams, Window
from .bdchain import ChainState, DeadChain, EventKind, EventRecord
from .dcftp import CoalescenceFailure, DcftpDraw, DominatingTimeline, SandwichState
from .cod import ClanState, ClanStatus, StepOnFinished, SweepRow, TrialOutcome
from .theory import DriftConstants, SupercriticalLambda, VerifyCheck

__version__ = "0.1.0"

__all__ = [
    "AttemptsExhausted",
    "ChainState",
    "ClanState",
    "ClanStatus",
    "CoalescenceFailure",
    "Configuration",
    "CoverageProfile",
    "DcftpDraw",
    "DeadChain",
    "DominatingTimeline",
    "DriftConstants",
    "EventKind",
    "EventRecord",
    "ModelParams",
    "Point",
    "SandwichState",
    "StepOnFinished",
    "SupercriticalLambda",
    "SweepRow",
    "TrialOutcome",
    "VerifyCheck",
    "Window",
    "__version__",
]
