"""Adaptive event-locating integrator: configuration, single segments and whole runs."""

import math

import numpy as np
import pytest

from app.core.exceptions import ChatterLimitExceeded, InvalidParameters
from app.domain import (
    DriveSignal,
    Guard,
    IntegratorConfig,
    JumpEvent,
    Regime,
    RobotParams,
    Trajectory,
)
from app.services.analysis import resonances, speed_upper_bound
from app.services.dynamics import guard_report
from app.services.harness import average_speed, measure_frequency, regime_occupancy
from app.services.integrator import (
    SampleGrid,
    initial_state,
    integrate_segment,
    natural_period,
    resolve_config,
    shortest_period,
    simulate,
)
from app.services.integrator.recorder import TrajectoryRecorder
from app.services.integrator.run import HybridRun


def _run_preset(preset, name, duration=None, **integrator_overrides):
    config = preset(name)
    params = config.robot.to_params()
    integrator = config.integrator.model_copy(update=integrator_overrides).to_config()
    start = initial_state(
        params, theta_offset=config.initial.theta_offset, theta_dot=config.initial.theta_dot
    )
    return params, simulate(
        start,
        params,
        config.drive.to_signal(),
        integrator,
        duration if duration is not None else config.simulate.duration,
    )


def _stiff_grip(theta0: float = math.pi / 3) -> RobotParams:
    """Desk system whose stiction never lets go."""
    return RobotParams(m=1.0, g=9.8, R=1.0, kappa=100.0, mu_s=5.0, mu_k=0.15, theta0=theta0)


# --------------------------------------------------------------------------- #
# Configuration
# --------------------------------------------------------------------------- #


def test_resolve_config_derives_step_and_event_tolerance(desk_params):
    drive = DriveSignal(A=0.01, omega=10.0)
    resolved = resolve_config(IntegratorConfig(), desk_params, drive)
    assert resolved.max_step == pytest.approx(shortest_period(desk_params, drive) / 40)
    assert resolved.event_tol == pytest.approx(resolved.max_step * 1e-7)
    # The fastest slip resonance is quicker than a 10 rad/s drive.
    assert shortest_period(desk_params, drive) < drive.period


def test_resolve_config_keeps_explicit_values(desk_params):
    config = IntegratorConfig(max_step=1e-3, event_tol=1e-12)
    assert resolve_config(config, desk_params, DriveSignal(A=0.01, omega=10.0)) is config


def test_sample_grid_spacing_and_bounds():
    grid = SampleGrid.for_run(0.0, 1.0, 1.0, IntegratorConfig(samples_per_period=4))
    assert grid.dt == 0.25
    np.testing.assert_array_equal(grid.times(0.0, 1.0, True), [0.25, 0.5, 0.75, 1.0])
    np.testing.assert_array_equal(grid.times(0.0, 1.0, False), [0.25, 0.5, 0.75])
    np.testing.assert_array_equal(grid.times(0.5, 2.0, True), [0.75, 1.0])


def test_sample_grid_caps_sample_count():
    config = IntegratorConfig(samples_per_period=1000, max_samples=11)
    grid = SampleGrid.for_run(0.0, 1.0, 0.1, config)
    assert grid.dt == pytest.approx(0.1)


def test_initial_state_rejects_angles_off_the_quarter_circle(desk_params):
    with pytest.raises(InvalidParameters):
        initial_state(desk_params, theta_offset=2.0)


# --------------------------------------------------------------------------- #
# Single segments
# --------------------------------------------------------------------------- #


def test_empty_interval_returns_the_state(desk_params, still_surface):
    state = initial_state(desk_params)
    final, event = integrate_segment(state, desk_params, still_surface, IntegratorConfig(), state.t)
    assert final is state
    assert event is None


def test_segment_rejects_a_stop_time_in_the_past(desk_params, still_surface):
    state = initial_state(desk_params)
    with pytest.raises(InvalidParameters):
        integrate_segment(state, desk_params, still_surface, IntegratorConfig(), -1.0)


def test_strong_drive_yields_stiction_at_the_guard_zero(desk_params):
    drive = DriveSignal(A=0.01, omega=30.0, phi=math.pi / 2)
    state = initial_state(desk_params)
    final, event = integrate_segment(state, desk_params, drive, IntegratorConfig(), 1.0)

    assert event is not None
    assert event.guard is Guard.STICK_YIELD
    assert event.from_regime is Regime.STICK
    assert event.to_regime.is_slip
    assert final.regime is Regime.STICK
    assert 0.0 < event.t < drive.period
    margin = guard_report(event.state_at_event, desk_params, drive).stick_margin
    assert abs(margin) < 1e-6


def test_event_times_are_plain_floats(preset):
    _, traj = _run_preset(preset, "desk_fast", duration=1.0)
    assert traj.events
    for event in traj.events:
        assert type(event.t) is float
        assert type(event.state_at_event.t) is float


# --------------------------------------------------------------------------- #
# Whole runs
# --------------------------------------------------------------------------- #


def test_undriven_rest_stays_put(desk_params):
    drive = DriveSignal(A=0.0, omega=10.0)
    traj = simulate(initial_state(desk_params), desk_params, drive, IntegratorConfig(), 2.0)
    assert traj.events == ()
    assert np.all(traj.regime == Regime.STICK.code)
    assert np.max(np.abs(traj.x - traj.x[0])) < 1e-9
    assert traj.t[-1] == pytest.approx(2.0)


def test_weak_drive_never_moves_the_tip(desk_params):
    drive = DriveSignal(A=1e-5, omega=30.0)
    traj = simulate(initial_state(desk_params), desk_params, drive, IntegratorConfig(), 3.0)
    assert traj.events == ()
    assert np.all(traj.regime == Regime.STICK.code)
    assert np.max(np.abs(traj.x_l - traj.x_l[0])) == 0.0
    assert abs(traj.net_displacement) < 1e-5


def test_small_stick_oscillation_runs_at_stick_resonance(desk_params, still_surface):
    omega_theta = resonances(desk_params).omega_theta
    start = initial_state(desk_params, theta_offset=1e-4)
    duration = 10 * natural_period(desk_params)
    traj = simulate(start, desk_params, still_surface, IntegratorConfig(), duration)
    assert traj.events == ()
    assert measure_frequency(traj, "theta") == pytest.approx(omega_theta, rel=1e-3)


def test_run_invariants(preset):
    params, traj = _run_preset(preset, "desk_fast", duration=2.0)
    assert len(traj.events) > 0
    times = [e.t for e in traj.events]
    assert times == sorted(times) and len(set(times)) == len(times)
    assert np.all(np.diff(traj.t) > 0.0)

    stick = traj.regime == Regime.STICK.code
    root = np.sqrt(params.R**2 - traj.y[stick] ** 2)
    assert np.max(np.abs(traj.x[stick] - traj.x_l[stick] - root)) < 1e-10 * params.R
    assert np.max(np.abs(traj.vx[stick] + traj.y[stick] * traj.vy[stick] / root)) < 1e-10

    for regime in (Regime.SLIP_FORWARD, Regime.SLIP_BACKWARD):
        on_arc = traj.regime == regime.code
        assert np.all(regime.sign * traj.xl_dot[on_arc] > -1e-8)

    if not traj.jump_flag:
        assert np.min(traj.normal_force) >= -1e-9 * params.m * params.g

    for event in traj.events:
        assert event.state_at_event.regime is event.from_regime
        assert event.from_regime is not event.to_regime


def test_runs_are_deterministic(preset):
    _, first = _run_preset(preset, "desk_fast", duration=1.0)
    _, second = _run_preset(preset, "desk_fast", duration=1.0)
    np.testing.assert_array_equal(first.t, second.t)
    np.testing.assert_array_equal(first.x, second.x)
    assert [e.t for e in first.events] == [e.t for e in second.events]


def test_chatter_limit_carries_the_partial_trajectory(preset):
    with pytest.raises(ChatterLimitExceeded) as excinfo:
        _run_preset(preset, "desk_fast", duration=2.0, max_events_per_period=1)
    partial = excinfo.value.partial
    assert isinstance(partial, Trajectory)
    assert len(partial) > 0
    assert len(partial.events) >= 1


def test_simulate_rejects_nonpositive_duration(desk_params, still_surface):
    with pytest.raises(InvalidParameters):
        simulate(initial_state(desk_params), desk_params, still_surface, IntegratorConfig(), 0.0)


def test_linear_model_run_stays_finite(kinetic_params):
    params = kinetic_params(0.11)
    drive = DriveSignal(A=0.001, omega=18.0)
    config = IntegratorConfig(model="linear", samples_per_period=200)
    traj = simulate(initial_state(params), params, drive, config, 2.0)
    assert np.all(np.isfinite(traj.y))
    assert 0.0 < traj.y.min() <= traj.y.max() < params.R


# --------------------------------------------------------------------------- #
# Loss of contact
# --------------------------------------------------------------------------- #


def _extending_start(params: RobotParams):
    theta_bar = initial_state(params).theta(params.R)
    return initial_state(params, theta_offset=params.theta0 - theta_bar - 1e-3, theta_dot=1.0)


def test_leg_extension_stops_the_run(still_surface):
    params = _stiff_grip()
    traj = simulate(_extending_start(params), params, still_surface, IntegratorConfig(), 1.0)
    assert traj.jump_flag
    assert traj.events[-1].guard is Guard.JUMP
    assert traj.t[-1] < 0.01


def test_recorded_jumps_let_the_run_continue(still_surface):
    params = _stiff_grip()
    config = IntegratorConfig(terminate_on_jump=False)
    traj = simulate(_extending_start(params), params, still_surface, config, 1.0)
    assert traj.jump_flag
    assert traj.t[-1] == pytest.approx(1.0)
    assert traj.events and all(e.guard is Guard.JUMP for e in traj.events)
    assert traj.max_overshoot > 0.0


def test_record_mode_keeps_regime_when_it_still_holds(desk_params, still_surface):
    recorder = TrajectoryRecorder(desk_params.R, desk_params.theta0)
    run = HybridRun(desk_params, still_surface, 1e-9, None, False, 200, 1.0, recorder)
    state = initial_state(desk_params)
    after = run.apply(state, JumpEvent(t=state.t, state=state, reason="normal_force"))
    assert after is state
    assert not run.stopped
    traj = recorder.build()
    assert traj.jump_flag
    assert [e.guard for e in traj.events] == [Guard.JUMP]


# --------------------------------------------------------------------------- #
# Reference behaviour of the desk-scale presets
# --------------------------------------------------------------------------- #


@pytest.mark.slow
@pytest.mark.parametrize("name,sign", [("desk_slow", -1), ("desk_fast", 1)])
def test_direction_reverses_with_drive_frequency(preset, name, sign):
    params, traj = _run_preset(preset, name)
    speed = average_speed(traj, 0.5)
    assert math.copysign(1.0, traj.net_displacement) == sign
    assert math.copysign(1.0, speed) == sign
    omega = preset(name).drive.omega_rad_s
    assert abs(speed) <= speed_upper_bound(params, omega)
    occupancy = regime_occupancy(traj, 0.5)
    assert sum(1 for share in occupancy.values() if share > 0.0) >= 2


def test_slow_drive_from_rest_holds_stiction_until_the_swing_builds(preset):
    # From rest at theta_bar the swing needs about eight drive periods to break stiction.
    _, traj = _run_preset(preset, "desk_slow", duration=1.2)
    first = traj.events[0]
    assert first.guard is Guard.STICK_YIELD
    assert first.from_regime is Regime.STICK
    assert first.t == pytest.approx(0.814, abs=0.05)
    held = traj.t < first.t
    assert np.all(traj.x_l[held] == traj.x_l[0])
