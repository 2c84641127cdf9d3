"""End-to-end runs of the ``bristlebot`` commands against temporary output directories."""

import csv
import json
from pathlib import Path

import pytest

from app import cli
from app.core.exceptions import StepSizeUnderflow
from app.models.config import RunConfig
from app.services.harness import sweep as sweep_module

DESK_ROBOT = """
[robot]
m = 1.0
g = 9.8
R = 1.0
kappa = 100.0
mu_s = 0.17
mu_k = 0.15
theta0_deg = 60.0
"""


def _run(*argv: str) -> int:
    return cli.main(list(argv))


def _read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def _header(path: Path) -> list:
    with path.open(encoding="utf-8", newline="") as f:
        return next(csv.reader(f))


def _rows(path: Path) -> list:
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def _write_toml(tmp_path: Path, body: str, name: str = "run.toml") -> Path:
    path = tmp_path / name
    path.write_text(DESK_ROBOT + body, encoding="utf-8")
    return path


# --------------------------------------------------------------------------- #
# analyze
# --------------------------------------------------------------------------- #


def test_analyze_reports_directional_resonances(tmp_path, capsys):
    assert _run("analyze", "--config", "probe_detuned", "--out-dir", str(tmp_path)) == 0
    analysis = _read_json(tmp_path / "analysis.json")
    assert analysis["resonances_rad_s"]["omega_yp"] == pytest.approx(15.77, rel=1e-2)
    assert analysis["resonances_rad_s"]["omega_yn"] == pytest.approx(20.17, rel=1e-2)
    assert analysis["stride_length"] == pytest.approx(0.5)
    assert "kappa_from_geometry" not in analysis
    assert "stick_yield_onset" not in analysis
    assert _header(tmp_path / "bounds.csv") == ["freq_hz", "omega_rad_s", "bound"]
    assert "omega_yp" in capsys.readouterr().out


def test_analyze_tabulates_the_speed_ceiling(tmp_path):
    assert _run("analyze", "--config", "desk_slow", "--out-dir", str(tmp_path)) == 0
    rows = _rows(tmp_path / "bounds.csv")
    assert len(rows) == 2
    assert float(rows[0]["omega_rad_s"]) == pytest.approx(10.0)
    assert float(rows[0]["bound"]) == pytest.approx(0.7958, abs=1e-4)


def test_analyze_millibot_geometry(tmp_path):
    assert _run("analyze", "--config", "millibot_60deg", "--out-dir", str(tmp_path)) == 0
    analysis = _read_json(tmp_path / "analysis.json")
    assert analysis["kappa_from_geometry"] == pytest.approx(0.7506, rel=1e-3)
    assert analysis["resonances_hz"]["f_y"] == pytest.approx(2269.0, rel=1e-3)
    onset = analysis["stick_yield_onset"]
    assert onset["above_omega_y"] is True
    assert onset["freq_hz"] == pytest.approx(3465.0, rel=0.03)


def test_default_out_dir_comes_from_settings(isolate_out_dir):
    assert _run("analyze", "--config", "desk_fast") == 0
    assert (isolate_out_dir / "analysis.json").exists()
    assert (isolate_out_dir / "effective_config.json").exists()


# --------------------------------------------------------------------------- #
# simulate
# --------------------------------------------------------------------------- #


def test_simulate_writes_trajectory_events_and_summary(tmp_path):
    code = _run(
        "simulate", "--config", "desk_fast", "--duration-s", "0.5", "--out-dir", str(tmp_path)
    )
    assert code == 0
    assert _header(tmp_path / "trajectory.csv") == [
        "t",
        "x",
        "y",
        "vx",
        "vy",
        "theta",
        "xl",
        "xl_dot",
        "normal_force",
        "regime",
    ]
    assert _header(tmp_path / "events.csv") == ["t", "guard", "from", "to"]

    summary = _read_json(tmp_path / "summary.json")
    assert summary["status"] == "ok"
    assert summary["error"] == ""
    assert summary["duration"] == pytest.approx(0.5)
    assert summary["omega_rad_s"] == pytest.approx(30.0)
    assert set(summary["occupancy"]) == {"stick", "slip_fwd", "slip_bwd"}
    assert sum(summary["occupancy"].values()) == pytest.approx(1.0)
    rows = _rows(tmp_path / "trajectory.csv")
    assert len(rows) == summary["samples"]
    assert {row["regime"] for row in rows} <= {"stick", "slip_fwd", "slip_bwd"}
    assert len(_rows(tmp_path / "events.csv")) == summary["events"]

    effective = RunConfig.load(tmp_path / "effective_config.json")
    assert effective.simulate.duration == 0.5


def test_simulate_is_byte_identical_across_reruns(tmp_path):
    first, second, replay = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    for out in (first, second):
        argv = ["simulate", "--config", "desk_fast", "--duration-s", "0.3", "--out-dir", str(out)]
        assert _run(*argv) == 0
    config = str(first / "effective_config.json")
    assert _run("simulate", "--config", config, "--out-dir", str(replay)) == 0
    for name in ("trajectory.csv", "events.csv", "summary.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()
        assert (first / name).read_bytes() == (replay / name).read_bytes()


def test_still_surface_never_leaves_stick(tmp_path):
    argv = ["--config", "desk_slow", "--amplitude-m", "0", "--duration-s", "0.5"]
    assert _run("simulate", *argv, "--out-dir", str(tmp_path)) == 0
    summary = _read_json(tmp_path / "summary.json")
    assert summary["events"] == 0
    assert summary["occupancy"]["stick"] == 1.0
    assert summary["amplitude_m"] == 0.0


def test_chatter_failure_still_writes_partial_output(tmp_path):
    config = _write_toml(
        tmp_path,
        "[drive]\namplitude = 0.01\nomega = 30.0\n\n[integrator]\nmax_events_per_period = 1\n",
    )
    out = tmp_path / "out"
    code = _run("simulate", "--config", str(config), "--duration-s", "2", "--out-dir", str(out))
    assert code == 2
    summary = _read_json(out / "summary.json")
    assert summary["status"] == "failed"
    assert "ChatterLimitExceeded" in summary["error"]
    assert summary["samples"] > 0
    assert (out / "trajectory.csv").exists()


# --------------------------------------------------------------------------- #
# sweep
# --------------------------------------------------------------------------- #

SMALL_SWEEP = """
[sweep]
freq_start = 1.0
freq_stop = 3.0
freq_step = 2.0
amplitude = 0.01
duration_per_point = 1.0
min_periods = 2

[integrator]
samples_per_period = 200
"""


def test_sweep_writes_table_and_summary(tmp_path):
    config = _write_toml(tmp_path, SMALL_SWEEP)
    out = tmp_path / "out"
    assert _run("sweep", "--config", str(config), "--parallel", "1", "--out-dir", str(out)) == 0
    assert _header(out / "sweep.csv") == [
        "freq_hz",
        "omega_rad_s",
        "avg_speed",
        "bound",
        "stick_frac",
        "fwd_frac",
        "bwd_frac",
        "jumped",
        "status",
        "error",
    ]
    rows = _rows(out / "sweep.csv")
    assert [float(r["freq_hz"]) for r in rows] == [1.0, 3.0]
    assert all(r["status"] == "ok" for r in rows)

    summary = _read_json(out / "summary.json")
    assert summary["points"] == 2
    assert summary["failed"] == 0
    assert summary["bound_check"]["checked"] == 2
    assert summary["bound_check"]["passed"] is True


def test_sweep_with_too_many_failed_points_exits_3(tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise StepSizeUnderflow(0.1, "stick")

    monkeypatch.setattr(sweep_module, "simulate", broken)
    config = _write_toml(tmp_path, SMALL_SWEEP)
    out = tmp_path / "out"
    assert _run("sweep", "--config", str(config), "--parallel", "1", "--out-dir", str(out)) == 3
    summary = _read_json(out / "summary.json")
    assert summary["failed"] == 2
    assert summary["success_fraction"] == 0.0
    assert {r["status"] for r in _rows(out / "sweep.csv")} == {"failed"}


def test_sweep_rejects_zero_workers(tmp_path):
    config = _write_toml(tmp_path, SMALL_SWEEP)
    argv = ["sweep", "--config", str(config), "--parallel", "0", "--out-dir", str(tmp_path)]
    assert _run(*argv) == 1


# --------------------------------------------------------------------------- #
# probe
# --------------------------------------------------------------------------- #


def test_probe_writes_classification(tmp_path):
    config = tmp_path / "probe.toml"
    config.write_text(
        "[robot]\nmu_s = 0.0\nmu_k = 0.14\n\n"
        "[drive]\namplitude = 0.0075\nomega = 18.0\n\n"
        "[probe]\nperiods = 4\n\n"
        "[integrator]\nsamples_per_period = 200\n",
        encoding="utf-8",
    )
    out = tmp_path / "out"
    assert _run("probe", "--config", str(config), "--out-dir", str(out)) == 0
    probe = _read_json(out / "probe.json")
    assert probe["classification"] in {"resonant", "non_resonant"}
    assert len(probe["growth"]) == len(probe["peak_to_peak"]) == 4
    assert probe["growth"][0] == pytest.approx(1.0)
    assert set(probe) == {
        "classification",
        "growth",
        "peak_to_peak",
        "crossed_y_bar_p",
        "crossed_y_bar_n",
        "jumped",
    }


# --------------------------------------------------------------------------- #
# invalid input
# --------------------------------------------------------------------------- #


def test_missing_config_exits_1(tmp_path, capsys):
    assert _run("simulate", "--config", "no_such_preset", "--out-dir", str(tmp_path)) == 1
    assert "no_such_preset" in capsys.readouterr().err


def test_unknown_key_exits_1(tmp_path, capsys):
    config = _write_toml(tmp_path, "[drive]\nspeed = 3.0\n")
    assert _run("analyze", "--config", str(config), "--out-dir", str(tmp_path / "out")) == 1
    assert "invalid configuration" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_invalid_override_exits_1(tmp_path):
    argv = ["simulate", "--config", "desk_fast", "--duration-s", "-1", "--out-dir", str(tmp_path)]
    assert _run(*argv) == 1


def test_malformed_toml_exits_1(tmp_path):
    config = tmp_path / "broken.toml"
    config.write_text("[robot\nm = ", encoding="utf-8")
    assert _run("analyze", "--config", str(config), "--out-dir", str(tmp_path / "out")) == 1
