import math
from pathlib import Path

import pytest

from app import cli
from app.core.config import settings
from app.domain import DriveSignal, IntegratorConfig, RobotParams
from app.models.config import RunConfig

# The user's real output directory, resolved once at collection time, before any
# fixture can redirect it. Nothing in the suite may write there.
REAL_OUT_DIR = Path(settings.out_dir).resolve()
PRESETS_DIR = Path(__file__).resolve().parent.parent / "presets"


def _refuse_real_out(path: Path) -> None:
    target = Path(path).resolve()
    if target == REAL_OUT_DIR or REAL_OUT_DIR in target.parents:
        raise AssertionError(
            f"A test tried to write command output into the real out/ directory ({target}). "
            "Tests get an isolated directory from the autouse `isolate_out_dir` fixture; "
            "pass --out-dir or rely on the patched settings instead."
        )


@pytest.fixture(autouse=True)
def isolate_out_dir(tmp_path_factory, monkeypatch):
    isolated = tmp_path_factory.mktemp("isolated_out")
    monkeypatch.setattr(settings, "out_dir", str(isolated))
    monkeypatch.setenv("BRISTLEBOT_OUT_DIR", str(isolated))

    real_prepare = cli._prepare_out_dir

    def guarded_prepare(args, config):
        out_dir = real_prepare(args, config)
        _refuse_real_out(out_dir)
        return out_dir

    monkeypatch.setattr(cli, "_prepare_out_dir", guarded_prepare)
    return isolated


@pytest.fixture
def desk_params() -> RobotParams:
    """The desk-scale system: kappa = 100 N m/rad, m = 1 kg, R = 1 m, theta0 = pi/3."""
    return RobotParams(
        m=1.0, g=9.8, R=1.0, kappa=100.0, mu_s=0.17, mu_k=0.15, theta0=math.pi / 3
    )


@pytest.fixture
def frictionless_params() -> RobotParams:
    return RobotParams(m=1.0, g=9.8, R=1.0, kappa=100.0, mu_s=0.0, mu_k=0.0, theta0=math.pi / 3)


@pytest.fixture
def kinetic_params():
    """Factory for the no-stiction desk system at a given mu_k."""

    def build(mu_k: float) -> RobotParams:
        return RobotParams(
            m=1.0, g=9.8, R=1.0, kappa=100.0, mu_s=0.0, mu_k=mu_k, theta0=math.pi / 3
        )

    return build


@pytest.fixture
def still_surface() -> DriveSignal:
    return DriveSignal.at_rest()


@pytest.fixture
def fast_config() -> IntegratorConfig:
    """Looser tolerances and sparse sampling for short qualitative runs."""
    return IntegratorConfig(rel_tol=1e-8, abs_tol=1e-11, samples_per_period=200)


@pytest.fixture
def preset():
    """Load a shipped preset by name."""

    def load(name: str) -> RunConfig:
        return RunConfig.load(PRESETS_DIR / f"{name}.toml")

    return load
