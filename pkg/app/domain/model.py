"""Physical parameters, the drive signal and the closed-form result sets.

Everything here is an immutable value. Constructors validate their invariants
and raise :class:`~app.core.exceptions.InvalidParameters`; nothing else in the
package re-checks them. No I/O.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Literal, Optional

from app.core.exceptions import FrictionOrderingWarning, InvalidParameters
from app.core.logfmt import meta

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RobotParams:
    """Constants of the robot-surface system, SI units throughout.

    ``kappa`` is the aggregate torsional stiffness of all legs acting as one
    equivalent leg; ``theta0`` is the unloaded leg angle measured from the
    horizontal; ``zeta`` is the angular damping coefficient of the stick
    regime (0 keeps the model conservative).
    """

    m: float
    g: float
    R: float
    kappa: float
    mu_s: float
    mu_k: float
    theta0: float
    zeta: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m", "g", "R", "kappa", "mu_s", "mu_k", "theta0", "zeta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidParameters(f"{name} must be a finite number, got {value!r}")
        if self.m <= 0:
            raise InvalidParameters(f"m must be > 0, got {self.m}")
        if self.g < 0:
            raise InvalidParameters(f"g must be >= 0, got {self.g}")
        if self.R <= 0:
            raise InvalidParameters(f"R must be > 0, got {self.R}")
        if self.kappa <= 0:
            raise InvalidParameters(f"kappa must be > 0, got {self.kappa}")
        if self.zeta < 0:
            raise InvalidParameters(f"zeta must be >= 0, got {self.zeta}")
        if not 0 < self.theta0 < math.pi / 2:
            raise InvalidParameters(f"theta0 must lie in (0, pi/2), got {self.theta0}")
        if self.mu_s < 0 or self.mu_k < 0:
            raise InvalidParameters(
                f"friction coefficients must be >= 0, got mu_s={self.mu_s} mu_k={self.mu_k}"
            )
        if self.mu_k > self.mu_s:
            logger.warning(f"[params] mu_k exceeds mu_s {meta(mu_k=self.mu_k, mu_s=self.mu_s)}")
            warnings.warn(
                f"mu_k={self.mu_k} exceeds mu_s={self.mu_s}",
                FrictionOrderingWarning,
                stacklevel=3,
            )

    @property
    def y_max(self) -> float:
        """Joint height with the leg at its unloaded angle."""
        return self.R * math.sin(self.theta0)


@dataclass(frozen=True)
class DriveSignal:
    """Vertical surface motion ``eta(t) = -A cos(omega t + phi)``.

    Derivatives are analytic. With ``A == 0`` every derivative is exactly
    ``0.0``, so driven equations collapse to the undriven ones bit for bit.
    """

    A: float
    omega: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.A) and math.isfinite(self.omega) and math.isfinite(self.phi)):
            raise InvalidParameters("drive amplitude, frequency and phase must be finite")
        if self.A < 0:
            raise InvalidParameters(f"drive amplitude must be >= 0, got {self.A}")
        if self.omega < 0:
            raise InvalidParameters(f"drive frequency must be >= 0, got {self.omega}")

    def eta(self, t: float) -> float:
        return -self.A * math.cos(self.omega * t + self.phi)

    def eta_dot(self, t: float) -> float:
        return self.A * self.omega * math.sin(self.omega * t + self.phi)

    def eta_ddot(self, t: float) -> float:
        if self.A == 0.0:
            return 0.0
        return self.A * self.omega**2 * math.cos(self.omega * t + self.phi)

    @property
    def period(self) -> float:
        """Drive period in seconds; ``inf`` for a static surface."""
        return 2.0 * math.pi / self.omega if self.omega > 0 else math.inf

    @property
    def freq_hz(self) -> float:
        return self.omega / (2.0 * math.pi)

    @classmethod
    def at_rest(cls) -> "DriveSignal":
        return cls(A=0.0, omega=0.0)


@dataclass(frozen=True)
class EquilibriumSet:
    """Neutral and direction-dependent equilibria.

    ``theta_bar_p`` / ``theta_bar_n`` are the steady states of the slip
    equation with the leg tip sliding forward / backward; ``delta_p`` and
    ``delta_n`` are their offsets from the unloaded angle.
    """

    theta_bar: float
    theta_bar_p: float
    theta_bar_n: float
    y_bar: float
    y_bar_p: float
    y_bar_n: float
    delta_p: float
    delta_n: float


@dataclass(frozen=True)
class ResonanceSet:
    """Small-amplitude resonances in rad/s.

    ``omega_yp`` / ``omega_yn`` use the full expressions evaluated at their own
    equilibria; the ``*_approx`` pair is the stiff-leg limit evaluated at the
    neutral equilibrium.
    """

    omega_theta: float
    omega_y: float
    omega_yp: float
    omega_yn: float
    omega_yp_approx: float
    omega_yn_approx: float

    def in_hz(self) -> "ResonanceSet":
        scale = 1.0 / (2.0 * math.pi)
        return ResonanceSet(
            omega_theta=self.omega_theta * scale,
            omega_y=self.omega_y * scale,
            omega_yp=self.omega_yp * scale,
            omega_yn=self.omega_yn * scale,
            omega_yp_approx=self.omega_yp_approx * scale,
            omega_yn_approx=self.omega_yn_approx * scale,
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """Knobs of the event-locating integrator.

    ``max_step`` and ``event_tol`` may be left ``None``; the integrator then
    derives them from the fastest period in play (see
    :func:`app.services.integrator.resolve_config`).
    """

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

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidParameters("rel_tol and abs_tol must be > 0")
        if self.max_step is not None and self.max_step <= 0:
            raise InvalidParameters(f"max_step must be > 0, got {self.max_step}")
        if self.event_tol is not None and self.event_tol <= 0:
            raise InvalidParameters(f"event_tol must be > 0, got {self.event_tol}")
        if (
            self.max_step is not None
            and self.event_tol is not None
            and self.event_tol >= self.max_step
        ):
            raise InvalidParameters(
                f"event_tol ({self.event_tol}) must be smaller than max_step ({self.max_step})"
            )
        if self.epsilon_v <= 0:
            raise InvalidParameters(f"epsilon_v must be > 0, got {self.epsilon_v}")
        if self.max_events_per_period < 1:
            raise InvalidParameters("max_events_per_period must be >= 1")
        if self.model not in ("full", "linear"):
            raise InvalidParameters(f"model must be 'full' or 'linear', got {self.model!r}")
        if self.samples_per_period < 1 or self.max_samples < 2:
            raise InvalidParameters("samples_per_period must be >= 1 and max_samples >= 2")
