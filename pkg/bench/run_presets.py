"""Tier-2 reproduction of the desk-scale experiments from their presets.

Direction reversal by frequency (desk_slow backward, desk_fast forward), the
sling pair (sling_large forward, sling_small backward) and the resonance pair
(probe_detuned non-resonant, probe_tuned resonant). Each row is one CLI run and
the table says which ones land on the expected outcome. The sling pair starts
at theta_bar with opposite leg rates (`initial.theta_dot`), which set the release
phase and so the direction.
Writes `bench/.run/presets_current.json`.
"""

import json
import sys
from typing import Any, Dict

from bench import PRESETS_DIR, RUN_DIR
from bench.metrics import sign_of

DIRECTION_CASES = {"desk_slow": -1, "desk_fast": 1, "sling_large": 1, "sling_small": -1}
PROBE_CASES = {"probe_detuned": "non_resonant", "probe_tuned": "resonant"}

# Below this a sling run counts as not having moved.
DISPLACEMENT_TOL = 1e-9


def _run(command: str, name: str) -> Dict[str, Any]:
    from app.cli import main as cli_main

    out_dir = RUN_DIR / name
    code = cli_main(
        [command, "--config", str(PRESETS_DIR / f"{name}.toml"), "--out-dir", str(out_dir)]
    )
    result_file = "probe.json" if command == "probe" else "summary.json"
    payload = json.loads((out_dir / result_file).read_text(encoding="utf-8"))
    payload["exit_code"] = code
    return payload


def main() -> int:
    rows: Dict[str, Dict[str, Any]] = {}
    for name, expected in DIRECTION_CASES.items():
        summary = _run("simulate", name)
        got = sign_of(summary["net_displacement"], tol=DISPLACEMENT_TOL)
        rows[name] = {"expected": expected, "got": got, "match": got == expected, **summary}
    for name, expected in PROBE_CASES.items():
        probe = _run("probe", name)
        got = probe["classification"]
        rows[name] = {"expected": expected, "got": got, "match": got == expected, **probe}

    print(f"{'preset':<8} {'expected':>14} {'got':>14}")
    for name, row in rows.items():
        mark = "PASS" if row["match"] else "FAIL"
        print(f"{name:<8} {str(row['expected']):>14} {str(row['got']):>14}  {mark}")

    out_path = RUN_DIR / "presets_current.json"
    with out_path.open("w", encoding="utf-8") as f:
        json.dump(rows, f, indent=2, sort_keys=True, default=str)
    print(f"\nWrote {out_path}")
    return 0 if all(row["match"] for row in rows.values()) else 1


if __name__ == "__main__":
    sys.exit(main())
