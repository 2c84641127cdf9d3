"""Run configuration: one validated document per CLI invocation.

Defaults reproduce the desk-scale system (kappa = 100 N m/rad, m = 1 kg,
R = 1 m, theta0 = pi/3) driven at 10 rad/s. Every section rejects unknown
keys, and the domain constructors run inside the validators so a bad file
fails before any simulation starts.
"""

import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.exceptions import InvalidParameters
from app.domain import DriveSignal, IntegratorConfig, RobotParams
from app.models.sweep import SweepSpec


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RobotSection(_Section):
    m: float = 1.0
    g: float = 9.8
    R: float = 1.0
    kappa: float = 100.0
    mu_s: float = 0.17
    mu_k: float = 0.15
    theta0: Optional[float] = None
    # Convenience spelling; exactly one of theta0 / theta0_deg may be set.
    theta0_deg: Optional[float] = None
    zeta: float = 0.0

    @model_validator(mode="after")
    def validate_params(self) -> "RobotSection":
        if self.theta0 is not None and self.theta0_deg is not None:
            raise ValueError("set theta0 or theta0_deg, not both")
        try:
            self.to_params()
        except InvalidParameters as e:
            raise ValueError(str(e)) from e
        return self

    @property
    def theta0_rad(self) -> float:
        if self.theta0 is not None:
            return self.theta0
        if self.theta0_deg is not None:
            return math.radians(self.theta0_deg)
        return math.pi / 3

    def to_params(self) -> RobotParams:
        return RobotParams(
            m=self.m,
            g=self.g,
            R=self.R,
            kappa=self.kappa,
            mu_s=self.mu_s,
            mu_k=self.mu_k,
            theta0=self.theta0_rad,
            zeta=self.zeta,
        )


class DriveSection(_Section):
    amplitude: float = 0.01
    # Drive frequency, either as rad/s or Hz.
    omega: Optional[float] = None
    freq_hz: Optional[float] = None
    phase: float = 0.0

    @model_validator(mode="after")
    def validate_drive(self) -> "DriveSection":
        if self.omega is not None and self.freq_hz is not None:
            raise ValueError("set drive.omega or drive.freq_hz, not both")
        try:
            self.to_signal()
        except InvalidParameters as e:
            raise ValueError(str(e)) from e
        return self

    @property
    def omega_rad_s(self) -> float:
        if self.omega is not None:
            return self.omega
        if self.freq_hz is not None:
            return 2.0 * math.pi * self.freq_hz
        return 10.0

    def to_signal(self) -> DriveSignal:
        return DriveSignal(A=self.amplitude, omega=self.omega_rad_s, phi=self.phase)


class IntegratorSection(_Section):
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: Optional[float] = None
    event_tol: Optional[float] = None
    epsilon_v: float = 1e-9
    max_events_per_period: int = 200
    terminate_on_jump: bool = True
    model: Literal["full", "linear"] = "full"
    samples_per_period: int = 2000
    max_samples: int = 2_000_000

    @model_validator(mode="after")
    def validate_integrator(self) -> "IntegratorSection":
        try:
            self.to_config()
        except InvalidParameters as e:
            raise ValueError(str(e)) from e
        return self

    def to_config(self) -> IntegratorConfig:
        return IntegratorConfig(**self.model_dump())


class InitialSection(_Section):
    """Start in stick at ``theta_bar + theta_offset`` with angular rate ``theta_dot``."""

    theta_offset: float = 0.0
    theta_dot: float = 0.0
    x_l: float = 0.0


class SimulateSection(_Section):
    duration: float = 3.0
    window_fraction: float = 0.5

    @field_validator("duration")
    @classmethod
    def validate_duration(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("simulate.duration must be > 0")
        return v

    @field_validator("window_fraction")
    @classmethod
    def validate_window(cls, v: float) -> float:
        if not 0.0 < v <= 1.0:
            raise ValueError("simulate.window_fraction must lie in (0, 1]")
        return v


class ProbeSection(_Section):
    periods: int = 20
    growth_threshold: float = 5.0

    @field_validator("periods")
    @classmethod
    def validate_periods(cls, v: int) -> int:
        if v < 2:
            raise ValueError("probe.periods must be >= 2")
        return v

    @field_validator("growth_threshold")
    @classmethod
    def validate_threshold(cls, v: float) -> float:
        if not v > 1.0:
            raise ValueError("probe.growth_threshold must be > 1")
        return v


class AnalyzeSection(_Section):
    # Frequencies (Hz) at which the speed ceiling is tabulated.
    freqs_hz: List[float] = Field(default_factory=list)
    # Optional leg geometry; when all three are set the geometric kappa is reported too.
    youngs_modulus: Optional[float] = None
    leg_diameter: Optional[float] = None
    n_effective_legs: Optional[float] = None
    # Accepted so material tables can be pasted whole; the bending formula does not use it.
    poisson_ratio: Optional[float] = None

    @field_validator("freqs_hz")
    @classmethod
    def validate_freqs(cls, v: List[float]) -> List[float]:
        if any(f < 0 for f in v):
            raise ValueError("analyze.freqs_hz must be >= 0")
        return v

    @property
    def has_geometry(self) -> bool:
        return None not in (self.youngs_modulus, self.leg_diameter, self.n_effective_legs)


class RunConfig(_Section):
    robot: RobotSection = Field(default_factory=RobotSection)
    drive: DriveSection = Field(default_factory=DriveSection)
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    initial: InitialSection = Field(default_factory=InitialSection)
    simulate: SimulateSection = Field(default_factory=SimulateSection)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    probe: ProbeSection = Field(default_factory=ProbeSection)
    analyze: AnalyzeSection = Field(default_factory=AnalyzeSection)

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        """Read a TOML preset or a JSON effective config."""
        path = Path(path)
        if path.suffix == ".json":
            data = json.loads(path.read_text(encoding="utf-8"))
        else:
            with path.open("rb") as f:
                data = tomllib.load(f)
        return cls.model_validate(data)

    def with_overrides(
        self,
        freq_hz: Optional[float] = None,
        amplitude_m: Optional[float] = None,
        duration_s: Optional[float] = None,
    ) -> "RunConfig":
        """Apply CLI overrides and re-validate the result."""
        drive, sweep, simulate = self.drive, self.sweep, self.simulate
        if freq_hz is not None:
            drive = drive.model_copy(update={"freq_hz": freq_hz, "omega": None})
        if amplitude_m is not None:
            drive = drive.model_copy(update={"amplitude": amplitude_m})
            sweep = sweep.model_copy(update={"amplitude": amplitude_m})
        if duration_s is not None:
            simulate = simulate.model_copy(update={"duration": duration_s})
            sweep = sweep.model_copy(update={"duration_per_point": duration_s})
        updated = self.model_copy(update={"drive": drive, "sweep": sweep, "simulate": simulate})
        return RunConfig.model_validate(updated.model_dump())

    def dump_json(self) -> str:
        return self.model_dump_json(indent=2)
