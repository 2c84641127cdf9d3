"""Regime accelerations, guard quantities and regime transitions.

Vertical actuation enters everywhere through ``G(t) = g + eta''(t)``. The
regime tag, never the sign of an instantaneous velocity, picks the friction
branch, so ``sgn(0)`` is never evaluated.

Scalar functions take and return floats (the public operations); the
``*_columns`` helpers evaluate the same formulas over numpy arrays of dense
output so the integrator can sample a step without a Python loop per point.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from app.core.exceptions import GeometricLock, InvalidParameters
from app.core.logfmt import meta
from app.domain import (
    DriveSignal,
    GuardReport,
    HybridState,
    JumpEvent,
    Regime,
    RobotParams,
)
from app.services.analysis import Direction, direction_sign, equilibria, resonances

logger = logging.getLogger(__name__)

# Angle slack when testing theta >= theta0 at a located event.
JUMP_ANGLE_TOL = 1e-12
# Normal force at or below this multiple of m*g counts as loss of contact.
JUMP_FORCE_TOL = 1e-9


def drive_gravity(t: float, params: RobotParams, drive: DriveSignal) -> float:
    """``G(t) = g + eta''(t)``: gravity as felt in the surface frame."""
    return params.g + drive.eta_ddot(t)


def leg_tip_velocity(state: HybridState, R: float) -> float:
    """``x_l' = x' + y' y / sqrt(R^2 - y^2)``."""
    return state.vx + state.vy * state.y / math.sqrt(R * R - state.y * state.y)


# --------------------------------------------------------------------------- #
# Full model
# --------------------------------------------------------------------------- #


def slip_accelerations(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    direction: Direction,
) -> Tuple[float, float]:
    """Joint accelerations ``(ax, ay)`` while the leg tip slides.

    Raises :class:`GeometricLock` when ``1 + s mu_k tan(theta) <= 0``: the
    friction torque then locks the leg and the slip equation has no solution.
    """
    s = direction_sign(direction)
    return slip_acceleration_terms(state.t, state.y, state.vy, s, params, drive)


def slip_acceleration_terms(
    t: float, y: float, vy: float, s: int, params: RobotParams, drive: DriveSignal
) -> Tuple[float, float]:
    R, m = params.R, params.m
    root = math.sqrt(R * R - y * y)
    denominator = 1.0 + params.mu_k * s * y / root
    if denominator <= 0.0:
        raise GeometricLock("forward" if s > 0 else "backward", denominator)

    G = drive_gravity(t, params, drive)
    theta = math.asin(y / R)
    restoring = params.kappa * (theta - params.theta0) / (m * root)
    if params.zeta > 0.0:
        restoring += params.zeta * vy / (m * (R * R - y * y))
    ay = -G - restoring / denominator
    ax = -params.mu_k * (ay + G) * s
    return ax, ay


def stick_acceleration(
    theta: float,
    theta_dot: float,
    t: float,
    params: RobotParams,
    drive: DriveSignal,
) -> float:
    """Angular acceleration of the leg rotating about a stationary tip."""
    G = drive_gravity(t, params, drive)
    torque = params.m * G * params.R * math.cos(theta) + params.kappa * (theta - params.theta0)
    if params.zeta > 0.0:
        torque += params.zeta * theta_dot
    return -torque / (params.m * params.R**2)


def stick_cartesian_kinematics(
    theta: float,
    theta_dot: float,
    theta_ddot: float,
    x_l: float,
    params: RobotParams,
) -> Tuple[float, float, float, float, float, float]:
    """Joint ``(x, y, vx, vy, ax, ay)`` implied by the leg angle and a fixed tip."""
    R = params.R
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    x = x_l + R * cos_t
    y = R * sin_t
    vx = -R * theta_dot * sin_t
    vy = R * theta_dot * cos_t
    ax = -R * theta_ddot * sin_t - R * theta_dot**2 * cos_t
    ay = R * theta_ddot * cos_t - R * theta_dot**2 * sin_t
    return x, y, vx, vy, ax, ay


# --------------------------------------------------------------------------- #
# Small-amplitude piecewise-linear model
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class LinearModel:
    """Coefficients of the model linearised about each regime's own equilibrium."""

    theta_bar: float
    y_bar_p: float
    y_bar_n: float
    omega_yp: float
    omega_yn: float
    stick_stiffness: float

    @classmethod
    def from_params(cls, params: RobotParams) -> "LinearModel":
        eq = equilibria(params)
        res = resonances(params)
        return cls(
            theta_bar=eq.theta_bar,
            y_bar_p=eq.y_bar_p,
            y_bar_n=eq.y_bar_n,
            omega_yp=res.omega_yp,
            omega_yn=res.omega_yn,
            stick_stiffness=params.kappa / (params.m * params.R**2),
        )


def linear_slip_accelerations(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    direction: Direction,
    coeffs: LinearModel,
) -> Tuple[float, float]:
    """``ay = -w^2 (y - y_eq) - eta''`` with ``w, y_eq`` of the slip branch."""
    s = direction_sign(direction)
    eta_ddot = drive.eta_ddot(state.t)
    if s > 0:
        ay = -coeffs.omega_yp**2 * (state.y - coeffs.y_bar_p) - eta_ddot
    else:
        ay = -coeffs.omega_yn**2 * (state.y - coeffs.y_bar_n) - eta_ddot
    ax = -params.mu_k * (ay + params.g + eta_ddot) * s
    return ax, ay


def linear_stick_acceleration(
    theta: float,
    t: float,
    params: RobotParams,
    drive: DriveSignal,
    coeffs: LinearModel,
) -> float:
    eta_ddot = drive.eta_ddot(t)
    sin_bar, cos_bar = math.sin(coeffs.theta_bar), math.cos(coeffs.theta_bar)
    stiffness = coeffs.stick_stiffness - sin_bar * (params.g + eta_ddot) / params.R
    return -stiffness * (theta - coeffs.theta_bar) - (cos_bar / params.R) * eta_ddot


# --------------------------------------------------------------------------- #
# Guards and transitions
# --------------------------------------------------------------------------- #


def stick_coordinates(state: HybridState, R: float) -> Tuple[float, float]:
    """``(theta, theta_dot)`` of a state, taking theta_dot from the vertical velocity."""
    theta = math.asin(state.y / R)
    theta_dot = state.vy / math.sqrt(R * R - state.y * state.y)
    return theta, theta_dot


def _stick_guard(
    theta: float,
    theta_dot: float,
    t: float,
    params: RobotParams,
    drive: DriveSignal,
    coeffs: Optional[LinearModel],
) -> Tuple[float, float, float]:
    """``(ax, ay, N)`` for a stick-consistent state."""
    if coeffs is None:
        theta_ddot = stick_acceleration(theta, theta_dot, t, params, drive)
    else:
        theta_ddot = linear_stick_acceleration(theta, t, params, drive, coeffs)
    _, _, _, _, ax, ay = stick_cartesian_kinematics(theta, theta_dot, theta_ddot, 0.0, params)
    normal_force = params.m * (ay + drive_gravity(t, params, drive))
    return ax, ay, normal_force


def guard_report(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    coeffs: Optional[LinearModel] = None,
) -> GuardReport:
    """Guard quantities at ``state``; ``coeffs`` selects the linear model.

    Negative normal force is reported here, never raised.
    """
    theta, theta_dot = stick_coordinates(state, params.R)
    stick_ax, stick_ay, stick_n = _stick_guard(theta, theta_dot, state.t, params, drive, coeffs)
    stick_margin = params.mu_s * stick_n - params.m * abs(stick_ax)

    if state.regime is Regime.STICK:
        return GuardReport(
            xl_dot=leg_tip_velocity(state, params.R),
            normal_force=stick_n,
            required_tangential=params.m * abs(stick_ax),
            stick_margin=stick_margin,
            ax=stick_ax,
            ay=stick_ay,
        )

    if coeffs is None:
        ax, ay = slip_accelerations(state, params, drive, state.regime)
    else:
        ax, ay = linear_slip_accelerations(state, params, drive, state.regime, coeffs)
    return GuardReport(
        xl_dot=leg_tip_velocity(state, params.R),
        normal_force=params.m * (ay + drive_gravity(state.t, params, drive)),
        required_tangential=params.m * abs(ax),
        stick_margin=stick_margin,
        ax=ax,
        ay=ay,
    )


def decide_transition(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    epsilon_v: float,
    coeffs: Optional[LinearModel] = None,
    ignore_jump: bool = False,
) -> Union[Regime, JumpEvent]:
    """Regime that follows ``state``, or a :class:`JumpEvent`.

    Candidate outcomes are ranked jump > stick capture > slip reversal >
    stick yield; when more than one holds the choice is logged.
    ``ignore_jump`` drops the jump candidates, which is how a run that
    records jumps instead of stopping finds the regime to continue in.
    """
    report = guard_report(state, params, drive, coeffs)
    theta, theta_dot = stick_coordinates(state, params.R)

    candidates: list[Union[Regime, JumpEvent]] = []
    if not ignore_jump:
        if report.normal_force <= JUMP_FORCE_TOL * params.m * params.g:
            candidates.append(JumpEvent(t=state.t, state=state, reason="normal_force"))
        if theta >= params.theta0 - JUMP_ANGLE_TOL and theta_dot > 0.0:
            candidates.append(JumpEvent(t=state.t, state=state, reason="leg_extension"))

    if state.regime.is_slip:
        arrested = state.regime.sign * report.xl_dot <= epsilon_v
        if arrested:
            if report.stick_margin > 0.0:
                candidates.append(Regime.STICK)
            else:
                candidates.append(state.regime.opposite)
    elif report.stick_margin <= 0.0 and report.ax != 0.0:
        candidates.append(Regime.SLIP_BACKWARD if report.ax > 0.0 else Regime.SLIP_FORWARD)

    if not candidates:
        return state.regime
    if len(candidates) > 1:
        logger.info(
            f"[transition] simultaneous guards resolved by priority "
            f"{meta(t=state.t, regime=state.regime.value, candidates=len(candidates))}"
        )
    return candidates[0]


def project_to_stick(state: HybridState, params: RobotParams) -> HybridState:
    """Capture the leg tip where it stands: fix ``x_l`` and make the velocity stick-consistent."""
    R = params.R
    root = math.sqrt(R * R - state.y * state.y)
    theta, theta_dot = stick_coordinates(state, R)
    x_l = state.x - root
    x, y, vx, vy, _, _ = stick_cartesian_kinematics(theta, theta_dot, 0.0, x_l, params)
    return HybridState(t=state.t, x=x, y=y, vx=vx, vy=vy, x_l=x_l, regime=Regime.STICK)


def release_from_stick(state: HybridState, regime: Regime, params: RobotParams) -> HybridState:
    """Same joint state, tagged with a slip regime; ``x_l`` keeps its last anchored value."""
    if not regime.is_slip:
        raise InvalidParameters("release_from_stick needs a slip regime")
    return state.with_regime(regime)


def mechanical_energy(state: HybridState, params: RobotParams) -> float:
    """``T + V`` with the centre-of-mass offset dropped."""
    theta = math.asin(state.y / params.R)
    kinetic = 0.5 * params.m * (state.vx**2 + state.vy**2)
    potential = params.m * params.g * state.y + 0.5 * params.kappa * (theta - params.theta0) ** 2
    return kinetic + potential


# --------------------------------------------------------------------------- #
# Vectorised columns for dense output
# --------------------------------------------------------------------------- #


def _drive_gravity_array(t: np.ndarray, params: RobotParams, drive: DriveSignal) -> np.ndarray:
    if drive.A == 0.0:
        return np.full_like(t, params.g)
    return params.g + drive.A * drive.omega**2 * np.cos(drive.omega * t + drive.phi)


def stick_columns(
    t: np.ndarray,
    theta: np.ndarray,
    theta_dot: np.ndarray,
    x_l: float,
    params: RobotParams,
    drive: DriveSignal,
    coeffs: Optional[LinearModel] = None,
) -> dict[str, np.ndarray]:
    R, m = params.R, params.m
    G = _drive_gravity_array(t, params, drive)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    if coeffs is None:
        torque = m * G * R * cos_t + params.kappa * (theta - params.theta0)
        if params.zeta > 0.0:
            torque = torque + params.zeta * theta_dot
        theta_ddot = -torque / (m * R**2)
    else:
        eta_ddot = G - params.g
        stiffness = coeffs.stick_stiffness - math.sin(coeffs.theta_bar) * G / R
        theta_ddot = (
            -stiffness * (theta - coeffs.theta_bar) - (math.cos(coeffs.theta_bar) / R) * eta_ddot
        )
    ay = R * theta_ddot * cos_t - R * theta_dot**2 * sin_t
    ax = -R * theta_ddot * sin_t - R * theta_dot**2 * cos_t
    return {
        "x": x_l + R * cos_t,
        "y": R * sin_t,
        "vx": -R * theta_dot * sin_t,
        "vy": R * theta_dot * cos_t,
        "x_l": np.full_like(t, x_l),
        "xl_dot": np.zeros_like(t),
        "normal_force": m * (ay + G),
        "ax": ax,
    }


def slip_columns(
    t: np.ndarray,
    x: np.ndarray,
    y: np.ndarray,
    vx: np.ndarray,
    vy: np.ndarray,
    regime: Regime,
    params: RobotParams,
    drive: DriveSignal,
    coeffs: Optional[LinearModel] = None,
) -> dict[str, np.ndarray]:
    R, m, s = params.R, params.m, regime.sign
    G = _drive_gravity_array(t, params, drive)
    root = np.sqrt(R * R - y * y)
    if coeffs is None:
        theta = np.arcsin(y / R)
        restoring = params.kappa * (theta - params.theta0) / (m * root)
        if params.zeta > 0.0:
            restoring = restoring + params.zeta * vy / (m * root**2)
        ay = -G - restoring / (1.0 + params.mu_k * s * y / root)
    else:
        omega, y_eq = (
            (coeffs.omega_yp, coeffs.y_bar_p) if s > 0 else (coeffs.omega_yn, coeffs.y_bar_n)
        )
        ay = -(omega**2) * (y - y_eq) - (G - params.g)
    return {
        "x": x,
        "y": y,
        "vx": vx,
        "vy": vy,
        "x_l": x - root,
        "xl_dot": vx + vy * y / root,
        "normal_force": m * (ay + G),
        "ax": -params.mu_k * (ay + G) * s,
    }
