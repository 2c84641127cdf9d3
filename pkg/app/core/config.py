import os
from pathlib import Path

from pydantic import field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Where commands write their CSVs and summaries when --out-dir is not given.
    out_dir: str = "out"

    # Sweep worker processes. 0 means one per available processor.
    parallel: int = 0

    log_level: str = "INFO"

    # Preset run configurations. Empty resolves to the repo's presets/ directory.
    presets_dir: str = ""

    model_config = {
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "env_prefix": "BRISTLEBOT_",
        "extra": "ignore",
    }

    @field_validator("parallel")
    @classmethod
    def validate_parallel(cls, v: int) -> int:
        if v < 0:
            raise ValueError("BRISTLEBOT_PARALLEL must be >= 0 (0 = one worker per processor)")
        return v

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"BRISTLEBOT_LOG_LEVEL is not a logging level: {v}")
        return level

    @property
    def resolved_parallel(self) -> int:
        if self.parallel:
            return self.parallel
        return os.cpu_count() or 1

    @property
    def resolved_presets_dir(self) -> Path:
        if self.presets_dir:
            return Path(self.presets_dir)
        return Path(__file__).resolve().parent.parent.parent / "presets"

    def preset_path(self, name: str) -> Path:
        """Path of a shipped preset, accepting the bare name (``desk_slow``) or a file name."""
        filename = name if name.endswith((".toml", ".json")) else f"{name}.toml"
        return self.resolved_presets_dir / filename


settings = Settings()
