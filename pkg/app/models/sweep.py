from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationInfo, field_validator, model_validator


class SweepSpec(BaseModel):
    """Frequency grid and per-point run protocol of a sweep.

    Each point runs for ``max(duration_per_point, min_periods / f)`` seconds
    from a fresh initial state and measures speed over the last
    ``measure_window_fraction`` of the run.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    freq_start: float = 0.8
    freq_stop: float = 6.4
    freq_step: float = 0.1
    amplitude: float = 0.01
    duration_per_point: float = 3.0
    measure_window_fraction: float = 0.5
    min_periods: int = 20
    # Drive phase for every point; the milli-bot presets use pi (eta = +A cos wt).
    phase: float = 0.0
    # Initial leg-angle offset from the neutral equilibrium, rad.
    theta_offset: float = 0.0
    # Upper bound on points, guards against a step typo turning into a million runs.
    max_points: Optional[int] = 100_000

    @field_validator("freq_start", "freq_step", "duration_per_point")
    @classmethod
    def validate_positive(cls, v: float, info: ValidationInfo) -> float:
        if not v > 0:
            raise ValueError(f"{info.field_name} must be > 0")
        return v

    @field_validator("amplitude")
    @classmethod
    def validate_amplitude(cls, v: float) -> float:
        if v < 0:
            raise ValueError("amplitude must be >= 0")
        return v

    @field_validator("measure_window_fraction")
    @classmethod
    def validate_window(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("measure_window_fraction must lie in (0, 1)")
        return v

    @field_validator("min_periods")
    @classmethod
    def validate_min_periods(cls, v: int) -> int:
        if v < 1:
            raise ValueError("min_periods must be >= 1")
        return v

    @model_validator(mode="after")
    def validate_grid(self) -> "SweepSpec":
        if self.freq_stop < self.freq_start:
            raise ValueError("freq_stop must be >= freq_start")
        if self.max_points is not None and self.n_points > self.max_points:
            raise ValueError(f"sweep has {self.n_points} points, more than {self.max_points}")
        return self

    @property
    def n_points(self) -> int:
        return int(np.floor((self.freq_stop - self.freq_start) / self.freq_step + 1e-9)) + 1

    def frequencies(self) -> np.ndarray:
        """Grid in Hz, built by index so no step drift accumulates."""
        return self.freq_start + self.freq_step * np.arange(self.n_points)

    def duration_for(self, freq_hz: float) -> float:
        return max(self.duration_per_point, self.min_periods / freq_hz)
