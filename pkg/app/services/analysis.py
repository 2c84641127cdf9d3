"""Closed-form layer: equilibria, resonances, stiction onset, speed ceiling, stiffness.

Every function here is pure. Equilibria are found by bracketed root finding
(``brentq``) followed by a Newton polish; brackets are searched on
``(0, theta0]`` first and only then above ``theta0``, so a solution always
exists inside the physically meaningful range when the spring can hold the
body up at all.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, Literal, Union

import numpy as np
from scipy.optimize import brentq, newton

from app.core.exceptions import InvalidParameters, NoConvergence, StaticallyUnstable
from app.core.logfmt import meta
from app.domain import EquilibriumSet, Regime, ResonanceSet, RobotParams

logger = logging.getLogger(__name__)

Direction = Union[Literal["forward", "backward"], Regime]

# Lower end of every angle bracket. The equations are singular at neither end,
# but theta = 0 is the body resting on the floor.
BRACKET_EPS = 1e-12
BRENT_MAX_ITER = 200
NEWTON_POLISH_ITER = 8
# Geometric grid over (omega_theta, omega_hi] on which the last stuck window is searched.
ONSET_GRID_POINTS = 4000


def direction_sign(direction: Direction) -> int:
    """+1 for forward slip, -1 for backward slip."""
    if isinstance(direction, Regime):
        if not direction.is_slip:
            raise InvalidParameters("direction must be a slip regime, got stick")
        return direction.sign
    if direction == "forward":
        return 1
    if direction == "backward":
        return -1
    raise InvalidParameters(f"direction must be 'forward' or 'backward', got {direction!r}")


def _bracketed_root(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    brackets: list[tuple[float, float]],
    what: str,
    tolerance: float,
) -> float:
    last_residual = math.inf
    for lo, hi in brackets:
        f_lo, f_hi = f(lo), f(hi)
        if f_hi == 0.0:
            return hi
        if f_lo == 0.0:
            return lo
        last_residual = min(last_residual, abs(f_lo), abs(f_hi))
        if np.sign(f_lo) == np.sign(f_hi):
            continue

        root, info = brentq(
            f,
            lo,
            hi,
            xtol=1e-15,
            rtol=4 * np.finfo(float).eps,
            maxiter=BRENT_MAX_ITER,
            full_output=True,
            disp=False,
        )
        if not info.converged:
            raise NoConvergence(what, info.iterations, abs(f(root)))

        polished = newton(f, root, fprime=fprime, tol=1e-16, maxiter=NEWTON_POLISH_ITER, disp=False)
        if lo <= polished <= hi and abs(f(polished)) < abs(f(root)):
            root = float(polished)

        residual = abs(f(root))
        if residual >= tolerance:
            raise NoConvergence(what, info.iterations + NEWTON_POLISH_ITER, residual)
        logger.debug(f"[equilibrium] {what} {meta(root=root, residual=residual)}")
        return float(root)

    raise NoConvergence(f"{what} (no sign change in any bracket)", 0, last_residual)


def _angle_brackets(theta0: float) -> list[tuple[float, float]]:
    return [(BRACKET_EPS, theta0), (theta0, math.pi / 2 - BRACKET_EPS)]


def solve_equilibrium(params: RobotParams) -> float:
    """Neutral equilibrium angle: ``m g R cos(th) + kappa (th - theta0) = 0``."""
    if params.g == 0.0:
        return params.theta0

    mgR = params.m * params.g * params.R
    kappa, theta0 = params.kappa, params.theta0

    def f(th: float) -> float:
        return mgR * math.cos(th) + kappa * (th - theta0)

    def fprime(th: float) -> float:
        return -mgR * math.sin(th) + kappa

    return _bracketed_root(f, fprime, _angle_brackets(theta0), "equilibrium", 1e-12 * kappa)


def solve_equilibrium_directional(params: RobotParams, direction: Direction) -> float:
    """Slip equilibrium for one friction branch.

    Solves ``th - theta0 = -(g m R / kappa)(cos th + s mu_k sin th)`` with
    ``s = +1`` forward and ``-1`` backward. Without kinetic friction both
    branches are the neutral equilibrium, returned as the same float.
    """
    s = direction_sign(direction)
    if params.mu_k == 0.0 or params.g == 0.0:
        return solve_equilibrium(params)

    c = params.g * params.m * params.R / params.kappa
    smu = s * params.mu_k
    theta0 = params.theta0

    def f(th: float) -> float:
        return th - theta0 + c * (math.cos(th) + smu * math.sin(th))

    def fprime(th: float) -> float:
        return 1.0 + c * (-math.sin(th) + smu * math.cos(th))

    label = "forward" if s > 0 else "backward"
    return _bracketed_root(f, fprime, _angle_brackets(theta0), f"{label} equilibrium", 1e-12)


def solve_equilibrium_height(params: RobotParams) -> float:
    """Neutral equilibrium solved in the joint height instead of the angle."""
    if params.g == 0.0:
        return params.y_max

    R, kappa, theta0 = params.R, params.kappa, params.theta0
    mg = params.m * params.g

    def f(y: float) -> float:
        u = y / R
        return mg + kappa * (math.asin(u) - theta0) / (R * math.sqrt(1.0 - u * u))

    def fprime(y: float) -> float:
        u = y / R
        c = math.sqrt(1.0 - u * u)
        return kappa / (R * R) * (1.0 / (c * c) + (math.asin(u) - theta0) * u / c**3)

    brackets = [(BRACKET_EPS * R, params.y_max), (params.y_max, R * (1.0 - 1e-12))]
    return _bracketed_root(f, fprime, brackets, "equilibrium height", 1e-12 * kappa / R)


def equilibria(params: RobotParams) -> EquilibriumSet:
    theta_bar = solve_equilibrium(params)
    theta_bar_p = solve_equilibrium_directional(params, "forward")
    theta_bar_n = solve_equilibrium_directional(params, "backward")
    R = params.R
    return EquilibriumSet(
        theta_bar=theta_bar,
        theta_bar_p=theta_bar_p,
        theta_bar_n=theta_bar_n,
        y_bar=R * math.sin(theta_bar),
        y_bar_p=R * math.sin(theta_bar_p),
        y_bar_n=R * math.sin(theta_bar_n),
        delta_p=theta_bar_p - params.theta0,
        delta_n=theta_bar_n - params.theta0,
    )


def slip_omega_squared(params: RobotParams, theta: float, signed_mu: float) -> float:
    """Squared small-amplitude slip frequency about the slip equilibrium ``theta``.

    ``signed_mu`` is ``+mu_k`` (forward), ``-mu_k`` (backward) or 0 (no
    kinetic friction, which gives the frictionless slip resonance).
    """
    delta = theta - params.theta0
    cos_t = math.cos(theta)
    tan_t = math.tan(theta)
    numerator = 1.0 + delta * tan_t
    if signed_mu != 0.0:
        numerator += signed_mu * (tan_t + delta * (tan_t**2 - math.sin(theta) / cos_t**2 - 1.0))
    denominator = params.R**2 * params.m * cos_t**2 * (1.0 + signed_mu * tan_t) ** 2
    return params.kappa * numerator / denominator


def stick_omega_squared(params: RobotParams, theta_bar: float) -> float:
    return (params.kappa / (params.m * params.R**2)) * (
        1.0 + (theta_bar - params.theta0) * math.tan(theta_bar)
    )


def _checked_sqrt(name: str, omega_squared: float) -> float:
    if not omega_squared > 0.0:
        raise StaticallyUnstable(name, omega_squared)
    return math.sqrt(omega_squared)


def resonances(params: RobotParams) -> ResonanceSet:
    eq = equilibria(params)
    mu = params.mu_k

    omega_theta = _checked_sqrt("omega_theta", stick_omega_squared(params, eq.theta_bar))
    omega_y2 = slip_omega_squared(params, eq.theta_bar, 0.0)
    omega_y = _checked_sqrt("omega_y", omega_y2)
    omega_yp = _checked_sqrt("omega_yp", slip_omega_squared(params, eq.theta_bar_p, mu))
    omega_yn = _checked_sqrt("omega_yn", slip_omega_squared(params, eq.theta_bar_n, -mu))

    tan_bar = math.tan(eq.theta_bar)
    omega_yp_approx = _checked_sqrt("omega_yp_approx", omega_y2 / (1.0 + mu * tan_bar))
    omega_yn_approx = _checked_sqrt("omega_yn_approx", omega_y2 / (1.0 - mu * tan_bar))

    return ResonanceSet(
        omega_theta=omega_theta,
        omega_y=omega_y,
        omega_yp=omega_yp,
        omega_yn=omega_yn,
        omega_yp_approx=omega_yp_approx,
        omega_yn_approx=omega_yn_approx,
    )


def stride_length(R: float, theta0: float) -> float:
    """Largest joint advance per cycle: the leg sweeping from ``theta0`` to vertical stiction."""
    return R * (1.0 - math.cos(theta0))


def speed_upper_bound(params: RobotParams, omega: float) -> float:
    """Ceiling on the asymptotic average speed at drive frequency ``omega`` (rad/s)."""
    if omega < 0:
        raise InvalidParameters(f"omega must be >= 0, got {omega}")
    return (omega / (2.0 * math.pi)) * stride_length(params.R, params.theta0)


def bending_stiffness(E: float, leg_diameter: float, R: float) -> float:
    """Tip stiffness ``3 E I / R^3`` of one cantilevered leg with circular section."""
    second_moment = math.pi * leg_diameter**4 / 64.0
    return 3.0 * E * second_moment / R**3


def kappa_from_geometry(E: float, leg_diameter: float, R: float, n_effective_legs: float) -> float:
    """Aggregate torsional stiffness ``n * k_b * R^2`` of ``n`` load-bearing legs."""
    for name, value in (
        ("E", E),
        ("leg_diameter", leg_diameter),
        ("R", R),
        ("n_effective_legs", n_effective_legs),
    ):
        if not value > 0:
            raise InvalidParameters(f"{name} must be > 0, got {value}")
    return n_effective_legs * bending_stiffness(E, leg_diameter, R) * R**2


def steady_stick_margin(params: RobotParams, amplitude: float, omega: float) -> float:
    """Worst stiction margin (N) of the steady small-amplitude stick response.

    The leg angle answers ``eta = -A cos(omega t)`` with amplitude
    ``(A omega^2 cos th / R) / (omega^2 - omega_theta^2)`` about ``theta_bar``.
    The margin is ``mu_s N - m |x''|`` at the peak of the drive, taken on
    whichever side leaves less normal force; contact lost there counts as
    zero normal force.
    """
    theta_bar = solve_equilibrium(params)
    return _steady_margin(params, amplitude, omega, theta_bar)


def _steady_margin(params: RobotParams, amplitude: float, omega: float, theta_bar: float) -> float:
    omega_theta2 = stick_omega_squared(params, theta_bar)
    if omega * omega == omega_theta2:
        return -math.inf
    surface = amplitude * omega * omega
    gain = omega * omega / (omega * omega - omega_theta2)
    sin_t, cos_t = math.sin(theta_bar), math.cos(theta_bar)
    tangential = sin_t * cos_t * surface * abs(gain)
    normal = max(params.g - surface * abs(1.0 - cos_t * cos_t * gain), 0.0)
    return params.m * (params.mu_s * normal - tangential)


def stick_yield_onset(params: RobotParams, amplitude: float) -> float:
    """Drive frequency (rad/s) above which steady stick forcing always breaks stiction.

    Close above ``omega_theta`` the stick resonance alone breaks stiction; a
    window where the leg stays stuck may follow before the surface
    acceleration grows large enough. The result is the upper end of the last
    such window, or ``omega_theta`` when there is none. Windows narrower than
    the search grid are not resolved.
    """
    if not amplitude > 0.0:
        raise InvalidParameters(f"amplitude must be > 0, got {amplitude}")
    if not params.mu_s > 0.0:
        raise InvalidParameters(f"stiction never holds without mu_s, got mu_s={params.mu_s}")

    theta_bar = solve_equilibrium(params)
    omega_theta = _checked_sqrt("omega_theta", stick_omega_squared(params, theta_bar))
    # Above this the tangential term alone exceeds mu_s g, so the margin is negative.
    lever = math.sin(theta_bar) * math.cos(theta_bar)
    omega_hi = max(
        2.0 * omega_theta, math.sqrt(2.0 * params.mu_s * params.g / (amplitude * lever))
    )

    def margin(omega: float) -> float:
        return _steady_margin(params, amplitude, omega, theta_bar)

    grid = np.geomspace(omega_theta * (1.0 + 1e-9), omega_hi, ONSET_GRID_POINTS)
    holding = np.flatnonzero([margin(w) >= 0.0 for w in grid])
    if holding.size == 0:
        return omega_theta
    i = int(holding[-1])
    onset = float(
        brentq(margin, grid[i], grid[i + 1], xtol=1e-12 * omega_hi, maxiter=BRENT_MAX_ITER)
    )
    logger.debug(f"[analysis] stick yield onset {meta(A=amplitude, omega=onset)}")
    return onset
