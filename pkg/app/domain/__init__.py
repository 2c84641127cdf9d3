"""Value types of the bristle-bot model and the results computed from it.

This package has no I/O. It is the one shape every downstream layer
(analysis, dynamics, integrator, harness, CLI) speaks.
"""

from .model import DriveSignal, EquilibriumSet, IntegratorConfig, ResonanceSet, RobotParams
from .results import (
    BoundReport,
    OccupancyMap,
    ProbeResult,
    ResponsePoint,
    SweepPoint,
    SweepResult,
    Trajectory,
)
from .state import Guard, GuardReport, HybridState, JumpEvent, Regime, TransitionEvent

__all__ = [
    "BoundReport",
    "DriveSignal",
    "EquilibriumSet",
    "Guard",
    "GuardReport",
    "HybridState",
    "IntegratorConfig",
    "JumpEvent",
    "OccupancyMap",
    "ProbeResult",
    "Regime",
    "ResonanceSet",
    "ResponsePoint",
    "RobotParams",
    "SweepPoint",
    "SweepResult",
    "Trajectory",
    "TransitionEvent",
]
