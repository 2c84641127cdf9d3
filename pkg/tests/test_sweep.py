"""Sweep grid validation and small end-to-end frequency sweeps."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core.exceptions import StepSizeUnderflow
from app.models.sweep import SweepSpec
from app.services.harness import bound_check, frequency_sweep, sweep_point
from app.services.harness import sweep as sweep_module


def _small_spec(**overrides) -> SweepSpec:
    values = dict(
        freq_start=1.0,
        freq_stop=5.0,
        freq_step=2.0,
        amplitude=0.01,
        duration_per_point=2.0,
        min_periods=2,
    )
    values.update(overrides)
    return SweepSpec(**values)


# --------------------------------------------------------------------------- #
# SweepSpec
# --------------------------------------------------------------------------- #


def test_grid_is_built_by_index():
    spec = SweepSpec(freq_start=0.8, freq_stop=6.4, freq_step=0.1)
    assert spec.n_points == 57
    freqs = spec.frequencies()
    assert freqs[0] == 0.8
    assert freqs[-1] == pytest.approx(6.4)
    np.testing.assert_allclose(np.diff(freqs), 0.1)


def test_duration_covers_minimum_periods():
    spec = SweepSpec(duration_per_point=3.0, min_periods=20)
    assert spec.duration_for(1.0) == 20.0
    assert spec.duration_for(10.0) == 3.0


def test_single_point_grid():
    spec = SweepSpec(freq_start=2.0, freq_stop=2.0, freq_step=0.5)
    assert spec.frequencies().tolist() == [2.0]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"freq_start": 2.0, "freq_stop": 1.0},
        {"freq_step": 0.0},
        {"freq_start": -1.0},
        {"amplitude": -0.01},
        {"measure_window_fraction": 1.0},
        {"min_periods": 0},
        {"freq_step": 1e-6, "max_points": 1000},
        {"bogus": 1},
    ],
)
def test_spec_rejects_invalid(kwargs):
    with pytest.raises(ValidationError):
        SweepSpec(**kwargs)


# --------------------------------------------------------------------------- #
# Sweeps
# --------------------------------------------------------------------------- #


def test_small_desk_sweep(desk_params, fast_config):
    result = frequency_sweep(desk_params, _small_spec(), fast_config, progress=False)
    assert [p.freq_hz for p in result.points] == [1.0, 3.0, 5.0]
    assert result.failed == 0
    assert all(math.isfinite(p.average_speed) for p in result.points)
    for p in result.points:
        assert p.omega == pytest.approx(2 * math.pi * p.freq_hz)
        assert p.stick_frac + p.fwd_frac + p.bwd_frac == pytest.approx(1.0)
    assert bound_check(result, desk_params).passed


def test_parallel_sweep_matches_serial(desk_params, fast_config):
    spec = _small_spec()
    serial = frequency_sweep(desk_params, spec, fast_config, parallel=1, progress=False)
    pooled = frequency_sweep(desk_params, spec, fast_config, parallel=2, progress=False)
    assert [p.freq_hz for p in pooled.points] == [p.freq_hz for p in serial.points]
    assert [p.average_speed for p in pooled.points] == [p.average_speed for p in serial.points]
    assert pooled.forward_peak_hz == serial.forward_peak_hz
    assert pooled.backward_peak_hz == serial.backward_peak_hz


def test_still_surface_sweep_never_moves(desk_params, fast_config):
    result = frequency_sweep(desk_params, _small_spec(amplitude=0.0), fast_config, progress=False)
    for p in result.points:
        assert p.average_speed == pytest.approx(0.0, abs=1e-12)
        assert p.stick_frac == 1.0
        assert p.fwd_frac == p.bwd_frac == 0.0


def test_numerical_failures_become_failed_points(desk_params, fast_config, monkeypatch):
    def broken(*args, **kwargs):
        raise StepSizeUnderflow(0.25, "slip_fwd", "step below floor")

    monkeypatch.setattr(sweep_module, "simulate", broken)
    result = frequency_sweep(desk_params, _small_spec(), fast_config, progress=False)
    assert result.failed == 3
    assert result.success_fraction == 0.0
    point = result.points[0]
    assert point.status == "failed"
    assert "step below floor" in point.error
    assert math.isnan(point.average_speed)
    assert point.bound > 0.0
    assert bound_check(result, desk_params).checked == 0


def test_sweep_point_runs_one_frequency(desk_params, fast_config):
    point = sweep_point((desk_params, _small_spec(), fast_config, 3.0))
    assert point.ok
    assert point.freq_hz == 3.0
    # Stride 0.5 m once per drive period.
    assert point.bound == pytest.approx(0.5 * 3.0)


def test_sweep_warns_when_stiction_outlasts_the_slip_resonance(
    preset, fast_config, monkeypatch, caplog
):
    def broken(*args, **kwargs):
        raise StepSizeUnderflow(0.0, "stick", "not integrated here")

    monkeypatch.setattr(sweep_module, "simulate", broken)
    params = preset("millibot_60deg").robot.to_params()
    spec = SweepSpec(freq_start=2000.0, freq_stop=2000.0, freq_step=50.0, amplitude=1e-8)
    with caplog.at_level("WARNING", logger="app.services.harness.sweep"):
        frequency_sweep(params, spec, fast_config, progress=False)
    assert "stiction holds above the slip resonance" in caplog.text


def test_sweep_stays_quiet_when_stiction_breaks_early(desk_params, fast_config, caplog):
    with caplog.at_level("WARNING", logger="app.services.harness.sweep"):
        frequency_sweep(desk_params, _small_spec(freq_stop=1.0), fast_config, progress=False)
    assert "stiction holds" not in caplog.text
