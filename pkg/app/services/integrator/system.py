"""One regime's ODE: right-hand side, state packing, sample columns and guards.

Stick integrates ``[theta, theta_dot]`` with the tip anchor held as a constant;
both slip regimes integrate ``[x, y, vx, vy]``. Guards are oriented so that an
event is always a crossing from ``> 0`` to ``<= 0``.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from app.domain import DriveSignal, HybridState, Regime, RobotParams
from app.services.dynamics import (
    LinearModel,
    drive_gravity,
    linear_stick_acceleration,
    slip_acceleration_terms,
    slip_columns,
    stick_acceleration,
    stick_cartesian_kinematics,
    stick_columns,
    stick_coordinates,
)

STICK_GUARDS = ("stick_margin", "normal_force", "leg_extension")
SLIP_GUARDS = ("tip_arrest", "normal_force", "leg_extension")


class RegimeSystem:
    def __init__(
        self,
        regime: Regime,
        x_l: float,
        params: RobotParams,
        drive: DriveSignal,
        epsilon_v: float,
        coeffs: Optional[LinearModel] = None,
    ):
        self.regime = regime
        self.x_l = x_l
        self.params = params
        self.drive = drive
        self.epsilon_v = epsilon_v
        self.coeffs = coeffs
        self.guard_names = SLIP_GUARDS if regime.is_slip else STICK_GUARDS

    @classmethod
    def for_state(
        cls,
        state: HybridState,
        params: RobotParams,
        drive: DriveSignal,
        epsilon_v: float,
        coeffs: Optional[LinearModel] = None,
    ) -> "RegimeSystem":
        return cls(state.regime, state.x_l, params, drive, epsilon_v, coeffs)

    # -- packing ---------------------------------------------------------------

    def pack(self, state: HybridState) -> np.ndarray:
        if self.regime.is_slip:
            return np.array([state.x, state.y, state.vx, state.vy], dtype=float)
        theta, theta_dot = stick_coordinates(state, self.params.R)
        return np.array([theta, theta_dot], dtype=float)

    def unpack(self, t: float, v: np.ndarray) -> HybridState:
        R = self.params.R
        if self.regime.is_slip:
            x, y, vx, vy = (float(c) for c in v)
            x_l = x - math.sqrt(R * R - y * y)
            return HybridState(t=t, x=x, y=y, vx=vx, vy=vy, x_l=x_l, regime=self.regime)
        theta, theta_dot = float(v[0]), float(v[1])
        x, y, vx, vy, _, _ = stick_cartesian_kinematics(
            theta, theta_dot, 0.0, self.x_l, self.params
        )
        return HybridState(t=t, x=x, y=y, vx=vx, vy=vy, x_l=self.x_l, regime=self.regime)

    # -- dynamics --------------------------------------------------------------

    def rhs(self, t: float, v: np.ndarray) -> np.ndarray:
        params, drive, coeffs = self.params, self.drive, self.coeffs
        if not self.regime.is_slip:
            theta, theta_dot = v[0], v[1]
            if coeffs is None:
                theta_ddot = stick_acceleration(theta, theta_dot, t, params, drive)
            else:
                theta_ddot = linear_stick_acceleration(theta, t, params, drive, coeffs)
            return np.array([theta_dot, theta_ddot])

        s = self.regime.sign
        _, y, vx, vy = v
        if coeffs is None:
            ax, ay = slip_acceleration_terms(t, y, vy, s, params, drive)
        else:
            eta_ddot = drive.eta_ddot(t)
            omega, y_eq = (
                (coeffs.omega_yp, coeffs.y_bar_p) if s > 0 else (coeffs.omega_yn, coeffs.y_bar_n)
            )
            ay = -(omega**2) * (y - y_eq) - eta_ddot
            ax = -params.mu_k * (ay + drive_gravity(t, params, drive)) * s
        return np.array([vx, vy, ax, ay])

    # -- columns and guards ----------------------------------------------------

    def columns(self, t: np.ndarray, values: np.ndarray) -> dict[str, np.ndarray]:
        """Sample columns (plus ``ax`` and ``theta``) at times ``t``; ``values`` is (n_state, n)."""
        if self.regime.is_slip:
            cols = slip_columns(
                t,
                values[0],
                values[1],
                values[2],
                values[3],
                self.regime,
                self.params,
                self.drive,
                self.coeffs,
            )
            cols["theta"] = np.arcsin(values[1] / self.params.R)
        else:
            cols = stick_columns(
                t, values[0], values[1], self.x_l, self.params, self.drive, self.coeffs
            )
            cols["theta"] = values[0]
        cols["t"] = t
        return cols

    def guards(self, cols: dict[str, np.ndarray]) -> np.ndarray:
        """Guard values, shape ``(3, n)``, rows ordered as :attr:`guard_names`."""
        params = self.params
        if self.regime.is_slip:
            first = self.regime.sign * cols["xl_dot"] - self.epsilon_v
        else:
            first = params.mu_s * cols["normal_force"] - params.m * np.abs(cols["ax"])
        return np.vstack([first, cols["normal_force"], params.theta0 - cols["theta"]])

    def columns_at(self, t: float, v: np.ndarray) -> dict[str, np.ndarray]:
        return self.columns(np.array([t]), np.asarray(v, dtype=float)[:, None])

    def guards_at(self, t: float, v: np.ndarray) -> np.ndarray:
        return self.guards(self.columns_at(t, v))[:, 0]


def crossed(before: np.ndarray, after: np.ndarray) -> np.ndarray:
    """Guard event mask: ``> 0`` to ``<= 0``, or leaving exactly zero downwards."""
    return ((before > 0.0) & (after <= 0.0)) | ((before == 0.0) & (after < 0.0))
