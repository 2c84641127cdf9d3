"""Tier-2 speed-vs-frequency reproduction for the two milli-bot leg angles.

Runs the `sweep` command on both milli-bot presets (250 points each, minutes with a
process pool), then checks the qualitative structure: a forward peak near the model's
own slip resonance f_y, a backward region above it with a smaller peak, and the
shallower legs peaking lower and slower. At the shipped 10 nm drive stiction holds
up to the onset printed alongside, above f_y, so the peak checks are expected to
fail there. Writes `bench/.run/sweep_current.json`;
exits non-zero when a check fails.
"""

import csv
import json
import math
import sys
from typing import Any, Dict

from bench import PRESETS_DIR, RUN_DIR
from bench.metrics import angle_shift, peak_structure, regions

PRESETS = ("millibot_60deg", "millibot_45deg")


def run_preset(name: str) -> Dict[str, Any]:
    from app.cli import main as cli_main

    out_dir = RUN_DIR / name
    code = cli_main(
        ["sweep", "--config", str(PRESETS_DIR / f"{name}.toml"), "--out-dir", str(out_dir)]
    )
    if code not in (0, 3):
        raise SystemExit(f"{name}: sweep exited with {code}")
    summary = json.loads((out_dir / "summary.json").read_text(encoding="utf-8"))
    with (out_dir / "sweep.csv").open(encoding="utf-8", newline="") as f:
        rows = [row for row in csv.DictReader(f) if row["status"] == "ok"]
    freqs = [float(row["freq_hz"]) for row in rows]
    speeds = [float(row["avg_speed"]) for row in rows]
    summary["forward_regions"] = regions(freqs, speeds, 1)
    summary["backward_regions"] = regions(freqs, speeds, -1)
    summary["exit_code"] = code
    return summary


def main() -> int:
    from app.models.config import RunConfig
    from app.services.analysis import resonances, stick_yield_onset

    summaries = {name: run_preset(name) for name in PRESETS}
    steep = RunConfig.load(PRESETS_DIR / "millibot_60deg.toml")
    f_y = resonances(steep.robot.to_params()).in_hz().omega_y
    onset = stick_yield_onset(steep.robot.to_params(), steep.sweep.amplitude)
    onset_hz = onset / (2.0 * math.pi)

    checks = peak_structure(summaries["millibot_60deg"], f_y)
    checks.update(angle_shift(summaries["millibot_60deg"], summaries["millibot_45deg"]))
    checks["bound_holds"] = all(s["bound_check"]["passed"] for s in summaries.values())

    print(f"\nmodel f_y (60 deg): {f_y:.1f} Hz")
    print(f"stiction breaks above (60 deg): {onset_hz:.1f} Hz")
    for name, s in summaries.items():
        print(
            f"{name:<16} fwd {s['forward_peak_hz']} Hz ({s['forward_peak_speed']})  "
            f"bwd {s['backward_peak_hz']} Hz ({s['backward_peak_speed']})  "
            f"failed {s['failed']}/{s['points']}"
        )
    for check, ok in checks.items():
        print(f"  {'PASS' if ok else 'FAIL'}  {check}")

    out_path = RUN_DIR / "sweep_current.json"
    with out_path.open("w", encoding="utf-8") as f:
        payload = {"f_y": f_y, "onset_hz": onset_hz, "summaries": summaries}
        payload["checks"] = checks
        json.dump(payload, f, indent=2, sort_keys=True)
    print(f"\nWrote {out_path}")
    return 0 if all(checks.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
