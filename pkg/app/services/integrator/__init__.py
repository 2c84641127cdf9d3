"""Hybrid-system time stepping: adaptive event-locating integrator and fixed-step oracle."""

from .adaptive import (
    SampleGrid,
    initial_state,
    integrate_segment,
    natural_period,
    resolve_config,
    shortest_period,
    simulate,
)
from .oracle import oracle_fixed_step

__all__ = [
    "SampleGrid",
    "initial_state",
    "integrate_segment",
    "natural_period",
    "oracle_fixed_step",
    "resolve_config",
    "shortest_period",
    "simulate",
]
