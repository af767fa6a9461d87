"""Base configuration management for the Hilbert geometry laboratory."""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, List, Optional

from mashumaro.mixins.dict import DataClassDictMixin

from hilbert_lab import const


@dataclass
class LogConfig(DataClassDictMixin):
    """Logging configuration."""

    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file_path: Optional[str] = None
    rotate_logs: bool = True
    max_bytes: int = 10 * 1024 * 1024  # 10MB
    backup_count: int = 5
    enable_json_logging: bool = False


@dataclass
class NumericsConfig(DataClassDictMixin):
    """Numerical knobs shared by the estimators."""

    angular_samples: int = const.ANGULAR_SAMPLES_2D
    sphere_nodes: int = const.SPHERE_NODES_3D
    transient_fraction: float = const.TRANSIENT_FRACTION
    mc_samples_per_ball: int = const.MC_SAMPLES_PER_BALL
    mc_max_relative_error: float = const.MC_MAX_RELATIVE_ERROR
    beta_max_separation: float = const.BETA_MAX_SEPARATION


@dataclass
class RunConfig(DataClassDictMixin):
    """Run-level settings: reproducibility and parallelism."""

    seed: int = 0
    threads: int = 1
    output_dir: Path = field(default_factory=lambda: Path("hilbert_lab_out"))


@dataclass
class BaseConfig:
    """Base configuration for the laboratory."""

    tool_name: str = "hilbert-lab"

    run: RunConfig = field(default_factory=RunConfig)
    numerics: NumericsConfig = field(default_factory=NumericsConfig)
    logging: LogConfig = field(default_factory=LogConfig)

    @classmethod
    def from_env(cls) -> "BaseConfig":
        """Create configuration from environment variables."""
        config = cls()

        # Load environment variables with HILBERT_ prefix
        for key, value in os.environ.items():
            if key.startswith("HILBERT_"):
                config._set_from_env(key[8:].lower(), value)

        return config

    def _set_from_env(self, key: str, value: str) -> None:
        """Set configuration value from environment variable.

        Attribute names may themselves contain underscores, so the key is
        consumed greedily: ``numerics_transient_fraction`` resolves to
        ``self.numerics.transient_fraction``.
        """
        parts = key.split("_")
        current: Any = self

        # Navigate through nested attributes
        while len(parts) > 1:
            for i in range(1, len(parts)):
                name = "_".join(parts[:i])
                if hasattr(current, name) and hasattr(getattr(current, name), "__dataclass_fields__"):
                    current = getattr(current, name)
                    parts = parts[i:]
                    break
            else:
                break

        # Set the final attribute if it exists
        final_attr = "_".join(parts)
        if hasattr(current, final_attr):
            attr_type = type(getattr(current, final_attr))
            try:
                if attr_type == bool:
                    setattr(current, final_attr, value.lower() in ("true", "1", "yes"))
                elif attr_type == int:
                    setattr(current, final_attr, int(value))
                elif attr_type == float:
                    setattr(current, final_attr, float(value))
                elif attr_type == list:
                    setattr(current, final_attr, value.split(","))
                elif issubclass(attr_type, Path):
                    setattr(current, final_attr, Path(value))
                else:
                    setattr(current, final_attr, value)
            except (ValueError, TypeError):
                pass  # Skip invalid values

    def validate(self) -> List[str]:
        """Validate configuration and return list of errors."""
        errors = []

        if self.run.threads <= 0:
            errors.append(f"threads must be positive: {self.run.threads}")

        if self.run.seed < 0:
            errors.append(f"seed must be non-negative: {self.run.seed}")

        if self.logging.level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            errors.append(f"Unknown log level: {self.logging.level}")

        if not 0 <= self.numerics.transient_fraction < 1:
            errors.append("transient_fraction must be in [0, 1)")

        if self.numerics.angular_samples < 16:
            errors.append("angular_samples must be at least 16")

        if self.numerics.mc_samples_per_ball <= 0:
            errors.append("mc_samples_per_ball must be positive")

        if not 0 < self.numerics.beta_max_separation <= 1:
            errors.append("beta_max_separation must be in (0, 1]")

        return errors
