"""Command-line front end: ``bristlebot {analyze,simulate,sweep,probe}``.

Every command takes ``--config`` (a preset name, a TOML file or an
``effective_config.json`` written by an earlier run) plus a few overrides,
writes its outputs into ``--out-dir`` and echoes the validated configuration
there as ``effective_config.json``. Exit codes: 0 success, 1 invalid input,
2 numerical failure, 3 sweep with too many failed points.
"""

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import BristleBotError, InvalidParameters, PartialSweepFailure
from app.core.logfmt import meta, short_exc
from app.domain import Regime, Trajectory
from app.models.config import RunConfig
from app.services.analysis import (
    equilibria,
    kappa_from_geometry,
    resonances,
    speed_upper_bound,
    stick_yield_onset,
    stride_length,
)
from app.services.harness import (
    average_speed,
    bound_check,
    frequency_sweep,
    regime_occupancy,
    resonance_probe,
)
from app.services.harness.constants import MIN_SUCCESS_FRACTION
from app.services.integrator import initial_state, simulate

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = [
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
EVENT_COLUMNS = ["t", "guard", "from", "to"]
SWEEP_COLUMNS = [
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


def _num(value: float) -> str:
    """Shortest round-trip spelling of a float."""
    return repr(float(value))


def _write_csv(path: Path, header: List[str], rows: Iterable[Sequence[str]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload: Dict[str, Any]) -> None:
    with path.open("w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def _resolve_config_path(value: Optional[str]) -> Optional[Path]:
    if value is None:
        return None
    path = Path(value)
    if path.exists():
        return path
    preset = settings.preset_path(value)
    if preset.exists():
        return preset
    raise InvalidParameters(f"config {value!r} is neither a file nor a shipped preset")


def load_config(args: argparse.Namespace) -> RunConfig:
    path = _resolve_config_path(args.config)
    config = RunConfig.load(path) if path is not None else RunConfig()
    return config.with_overrides(
        freq_hz=args.freq_hz, amplitude_m=args.amplitude_m, duration_s=args.duration_s
    )


def _prepare_out_dir(args: argparse.Namespace, config: RunConfig) -> Path:
    out_dir = Path(args.out_dir or settings.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective_config.json").write_text(config.dump_json() + "\n", encoding="utf-8")
    return out_dir


# --------------------------------------------------------------------------- #
# analyze
# --------------------------------------------------------------------------- #


def cmd_analyze(config: RunConfig, out_dir: Path) -> int:
    params = config.robot.to_params()
    eq = equilibria(params)
    res = resonances(params)
    hz = res.in_hz()

    omegas = [(f, 2.0 * math.pi * f) for f in config.analyze.freqs_hz]
    bounds = [(f, w, speed_upper_bound(params, w)) for f, w in omegas]
    payload: Dict[str, Any] = {
        "equilibria": {
            "theta_bar": eq.theta_bar,
            "theta_bar_p": eq.theta_bar_p,
            "theta_bar_n": eq.theta_bar_n,
            "y_bar": eq.y_bar,
            "y_bar_p": eq.y_bar_p,
            "y_bar_n": eq.y_bar_n,
            "delta_p": eq.delta_p,
            "delta_n": eq.delta_n,
        },
        "resonances_rad_s": {
            "omega_theta": res.omega_theta,
            "omega_y": res.omega_y,
            "omega_yp": res.omega_yp,
            "omega_yn": res.omega_yn,
            "omega_yp_approx": res.omega_yp_approx,
            "omega_yn_approx": res.omega_yn_approx,
        },
        "resonances_hz": {
            "f_theta": hz.omega_theta,
            "f_y": hz.omega_y,
            "f_yp": hz.omega_yp,
            "f_yn": hz.omega_yn,
            "f_yp_approx": hz.omega_yp_approx,
            "f_yn_approx": hz.omega_yn_approx,
        },
        "stride_length": stride_length(params.R, params.theta0),
        "speed_bound": [{"freq_hz": f, "omega_rad_s": w, "bound": b} for f, w, b in bounds],
    }
    amplitude = config.drive.amplitude
    if amplitude > 0.0 and params.mu_s > 0.0:
        onset = stick_yield_onset(params, amplitude)
        payload["stick_yield_onset"] = {
            "amplitude": amplitude,
            "omega_rad_s": onset,
            "freq_hz": onset / (2.0 * math.pi),
            "above_omega_y": onset > res.omega_y,
        }
    geometry = config.analyze
    if geometry.has_geometry:
        payload["kappa_from_geometry"] = kappa_from_geometry(
            geometry.youngs_modulus, geometry.leg_diameter, params.R, geometry.n_effective_legs
        )

    _write_json(out_dir / "analysis.json", payload)
    _write_csv(
        out_dir / "bounds.csv",
        ["freq_hz", "omega_rad_s", "bound"],
        ([_num(f), _num(w), _num(b)] for f, w, b in bounds),
    )

    print(f"theta_bar    {eq.theta_bar:.6f} rad   y_bar   {eq.y_bar:.6g} m")
    print(f"theta_bar_p  {eq.theta_bar_p:.6f} rad   y_bar_p {eq.y_bar_p:.6g} m")
    print(f"theta_bar_n  {eq.theta_bar_n:.6f} rad   y_bar_n {eq.y_bar_n:.6g} m")
    print(f"{'':12} {'rad/s':>12} {'Hz':>12}")
    for name in ("omega_theta", "omega_y", "omega_yp", "omega_yn"):
        print(f"{name:<12} {getattr(res, name):>12.6g} {getattr(hz, name):>12.6g}")
    if "stick_yield_onset" in payload:
        onset_hz = payload["stick_yield_onset"]["freq_hz"]
        print(f"stiction breaks above {onset_hz:.6g} Hz at A = {amplitude:.3g} m")
    for f, w, b in bounds:
        print(f"bound at {f:.6g} Hz ({w:.6g} rad/s): {b:.6g} m/s")
    if "kappa_from_geometry" in payload:
        print(f"kappa_from_geometry {payload['kappa_from_geometry']:.6g} N m/rad")
    return 0


# --------------------------------------------------------------------------- #
# simulate
# --------------------------------------------------------------------------- #


def _trajectory_rows(traj: Trajectory) -> Iterable[List[str]]:
    theta = traj.theta
    for i in range(len(traj)):
        yield [
            _num(traj.t[i]),
            _num(traj.x[i]),
            _num(traj.y[i]),
            _num(traj.vx[i]),
            _num(traj.vy[i]),
            _num(theta[i]),
            _num(traj.x_l[i]),
            _num(traj.xl_dot[i]),
            _num(traj.normal_force[i]),
            Regime.from_code(traj.regime[i]).value,
        ]


def _write_trajectory(traj: Trajectory, out_dir: Path) -> None:
    _write_csv(out_dir / "trajectory.csv", TRAJECTORY_COLUMNS, _trajectory_rows(traj))
    _write_csv(
        out_dir / "events.csv",
        EVENT_COLUMNS,
        (
            [_num(e.t), e.guard.value, e.from_regime.value, e.to_regime.value]
            for e in traj.events
        ),
    )


def _simulation_summary(traj: Trajectory, window_fraction: float) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "samples": len(traj),
        "events": len(traj.events),
        "jump_flag": traj.jump_flag,
        "max_overshoot": traj.max_overshoot,
        "net_displacement": traj.net_displacement,
        "duration": traj.duration,
        "window_fraction": window_fraction,
    }
    if len(traj) >= 2 and traj.duration > 0.0:
        occupancy = regime_occupancy(traj, window_fraction)
        summary["average_speed"] = average_speed(traj, window_fraction)
        summary["occupancy"] = {regime.value: occupancy[regime] for regime in Regime}
    return summary


def cmd_simulate(config: RunConfig, out_dir: Path) -> int:
    params = config.robot.to_params()
    drive = config.drive.to_signal()
    integrator = config.integrator.to_config()
    start = initial_state(
        params,
        theta_offset=config.initial.theta_offset,
        theta_dot=config.initial.theta_dot,
        x_l=config.initial.x_l,
    )

    status, error, exit_code = "ok", "", 0
    try:
        traj = simulate(start, params, drive, integrator, config.simulate.duration)
    except BristleBotError as e:
        if e.partial is None:
            raise
        traj, status, error, exit_code = e.partial, "failed", short_exc(e), e.exit_code
        logger.error(f"[cli] simulation failed, writing partial output {meta(error=error)}")

    _write_trajectory(traj, out_dir)
    summary = _simulation_summary(traj, config.simulate.window_fraction)
    summary.update(
        status=status,
        error=error,
        freq_hz=drive.freq_hz,
        omega_rad_s=drive.omega,
        amplitude_m=drive.A,
    )
    _write_json(out_dir / "summary.json", summary)

    print(f"net displacement {summary['net_displacement']:.6g} m over {summary['duration']:.6g} s")
    if "average_speed" in summary:
        print(f"average speed    {summary['average_speed']:.6g} m/s")
    print(f"events {summary['events']}  jump {traj.jump_flag}  status {status}")
    return exit_code


# --------------------------------------------------------------------------- #
# sweep
# --------------------------------------------------------------------------- #


def cmd_sweep(config: RunConfig, out_dir: Path, parallel: int) -> int:
    params = config.robot.to_params()
    spec = config.sweep
    result = frequency_sweep(params, spec, config.integrator.to_config(), parallel=parallel)
    report = bound_check(result, params)

    _write_csv(
        out_dir / "sweep.csv",
        SWEEP_COLUMNS,
        (
            [
                _num(p.freq_hz),
                _num(p.omega),
                _num(p.average_speed),
                _num(p.bound),
                _num(p.stick_frac),
                _num(p.fwd_frac),
                _num(p.bwd_frac),
                "true" if p.jumped else "false",
                p.status,
                p.error,
            ]
            for p in result.points
        ),
    )
    summary = {
        "points": len(result.points),
        "failed": result.failed,
        "success_fraction": result.success_fraction,
        "forward_peak_hz": result.forward_peak_hz,
        "forward_peak_speed": result.forward_peak_speed,
        "backward_peak_hz": result.backward_peak_hz,
        "backward_peak_speed": result.backward_peak_speed,
        "bound_check": {
            "checked": report.checked,
            "passed": report.passed,
            "violations": [p.freq_hz for p in report.violations],
            "min_margin": report.min_margin,
            "mean_margin": report.mean_margin,
            "max_ratio": report.max_ratio,
        },
        "jumped_points": sum(1 for p in result.points if p.jumped),
        "max_overshoot": max(
            (p.max_overshoot for p in result.points if p.ok), default=-math.inf
        ),
    }
    _write_json(out_dir / "summary.json", summary)

    print(f"forward peak  {result.forward_peak_hz} Hz  speed {result.forward_peak_speed}")
    print(f"backward peak {result.backward_peak_hz} Hz  speed {result.backward_peak_speed}")
    print(f"bound check {'passed' if report.passed else 'VIOLATED'} on {report.checked} points")
    if result.success_fraction < MIN_SUCCESS_FRACTION:
        raise PartialSweepFailure(result.failed, len(result.points))
    return 0


# --------------------------------------------------------------------------- #
# probe
# --------------------------------------------------------------------------- #


def cmd_probe(config: RunConfig, out_dir: Path) -> int:
    params = config.robot.to_params()
    start = initial_state(
        params,
        theta_offset=config.initial.theta_offset,
        theta_dot=config.initial.theta_dot,
        x_l=config.initial.x_l,
    )
    result = resonance_probe(
        params,
        config.drive.to_signal(),
        config.integrator.to_config(),
        periods=config.probe.periods,
        growth_threshold=config.probe.growth_threshold,
        start=start,
    )
    _write_json(
        out_dir / "probe.json",
        {
            "classification": result.classification,
            "growth": result.growth,
            "peak_to_peak": result.peak_to_peak,
            "crossed_y_bar_p": result.crossed_y_bar_p,
            "crossed_y_bar_n": result.crossed_y_bar_n,
            "jumped": result.jumped,
        },
    )
    print(f"{result.classification}  max growth {max(result.growth, default=0.0):.3f}")
    return 0


# --------------------------------------------------------------------------- #
# entry point
# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bristlebot", description="Bristle-robot stick-slip dynamics toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("analyze", "equilibria, resonances and speed ceiling"),
        ("simulate", "one run: trajectory, events and summary"),
        ("sweep", "average speed over a frequency grid"),
        ("probe", "resonance / non-resonance classification of one driven run"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="preset name, TOML file or effective_config.json")
        p.add_argument("--freq-hz", type=float, help="override the drive frequency (Hz)")
        p.add_argument("--amplitude-m", type=float, help="override the drive amplitude (m)")
        p.add_argument("--duration-s", type=float, help="override the run duration (s)")
        p.add_argument("--out-dir", help=f"output directory (default {settings.out_dir})")
        if name == "sweep":
            p.add_argument(
                "--parallel",
                type=int,
                default=None,
                help="worker processes (default: one per processor)",
            )
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        out_dir = _prepare_out_dir(args, config)
        logger.info(f"[cli] {args.command} {meta(out_dir=str(out_dir))}")
        if args.command == "analyze":
            return cmd_analyze(config, out_dir)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir)
        if args.command == "sweep":
            parallel = args.parallel if args.parallel is not None else settings.resolved_parallel
            if parallel < 1:
                raise InvalidParameters(f"--parallel must be >= 1, got {parallel}")
            return cmd_sweep(config, out_dir, parallel)
        return cmd_probe(config, out_dir)
    except ValidationError as e:
        print(f"invalid configuration:\n{e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {short_exc(e)}", file=sys.stderr)
        return 1
    except BristleBotError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
