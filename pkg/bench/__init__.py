"""Benchmark package: tier-2 acceptance runs that take minutes, kept out of the unit suite.

`settings` is built the moment `app.core.config` is first imported and reads
`BRISTLEBOT_OUT_DIR` at that instant, so the output directory is redirected here, at
package import, before any bench module can pull in an app module. Bench output then
never lands in the user's `out/`.
"""

import os
import sys
from pathlib import Path

BENCH_DIR = Path(__file__).parent
REPO_ROOT = BENCH_DIR.parent
RUN_DIR = BENCH_DIR / ".run"
PRESETS_DIR = REPO_ROOT / "presets"

RUN_DIR.mkdir(exist_ok=True)

# Under pytest the suite's own autouse fixture owns the output directory.
_UNDER_PYTEST = "pytest" in sys.modules

if not _UNDER_PYTEST:
    os.environ["BRISTLEBOT_OUT_DIR"] = str(RUN_DIR)

    if "app.core.config" in sys.modules:
        raise RuntimeError(
            "app.core.config was imported before bench/__init__.py, so `settings` may "
            "already point at the real out/. Import bench (or a bench.* module) first."
        )
