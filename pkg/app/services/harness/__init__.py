"""Experiments built on the integrator: speed measurement, sweeps and probes."""

from .probes import (
    period_peak_to_peak,
    resonance_probe,
    response_peak,
    response_scan,
    sling_experiment,
)
from .speed import average_speed, measure_frequency, regime_occupancy
from .sweep import bound_check, frequency_sweep, locate_peaks, sweep_point

__all__ = [
    "average_speed",
    "bound_check",
    "frequency_sweep",
    "locate_peaks",
    "measure_frequency",
    "period_peak_to_peak",
    "regime_occupancy",
    "resonance_probe",
    "response_peak",
    "response_scan",
    "sling_experiment",
    "sweep_point",
]
