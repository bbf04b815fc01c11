"""
Configuration management for tistar.

Handles YAML-based configuration with XDG Base Directory compliance,
validation of numerical defaults (seeds, tolerances, lattice sizes),
and dot-key access for the ``config`` CLI group.
"""

import os
import shutil
from pathlib import Path
from typing import Any, Optional, Union

import yaml
from pydantic import BaseModel, Field, field_validator

from ..utils.logging import get_logger

logger = get_logger(__name__)


class SamplingConfig(BaseModel):
    """Random momentum sampling used by all pointwise predicates."""

    seed: int = Field(20240917, ge=0)
    box_radius: float = Field(3.0, gt=0.0)
    pairs: int = Field(1000, gt=0)
    triples: int = Field(200, gt=0)


class ToleranceConfig(BaseModel):
    """Residual thresholds, applied to magnitude-scaled residuals."""

    predicate: float = Field(1e-9, gt=0.0)
    harmonic: float = Field(1e-10, gt=0.0)
    equivalence: float = Field(1e-8, gt=0.0)
    witness: float = Field(1e-8, gt=0.0)
    star: float = Field(1e-9, gt=0.0)
    identity: float = Field(1e-10, gt=0.0)


class GridConfig(BaseModel):
    """Default momentum lattice for star products and witness recovery."""

    dim: int = Field(2, ge=1, le=6)
    points: int = Field(15, ge=3)
    step: float = Field(1.0, gt=0.0)

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("Points per axis must be odd")
        return v


class LoopConfigDefaults(BaseModel):
    """Default loop-momentum lattice for amplitude sums."""

    mass2: float = Field(1.0, gt=0.0)
    points: int = Field(9, ge=3)
    step: float = Field(1.0, gt=0.0)
    max_terms: int = Field(2_000_000, gt=0)

    @field_validator("points")
    @classmethod
    def validate_points(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("Loop points per axis must be odd")
        return v


class FiniteDifferenceConfig(BaseModel):
    """Finite-difference settings for the space-time commutator matrix."""

    step: float = Field(1e-4, gt=0.0, le=1e-1)
    richardson: bool = True


class ExecutionConfig(BaseModel):
    """Worker pool limits."""

    threads: int = Field(1, ge=1, le=256)
    chunk_size: int = Field(256, gt=0)


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = "INFO"
    file: Optional[str] = None
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    backup_count: int = 3

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: str) -> str:
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v.upper()


class Config(BaseModel):
    """Main configuration class."""

    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    loop: LoopConfigDefaults = Field(default_factory=LoopConfigDefaults)
    finite_difference: FiniteDifferenceConfig = Field(
        default_factory=FiniteDifferenceConfig
    )
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    # Runtime properties
    config_path: Optional[Path] = Field(None, exclude=True)


class ConfigManager:
    """Manages configuration loading, saving, and validation."""

    def __init__(self) -> None:
        self.config_dir = self._get_config_dir()
        self.config_file = self.config_dir / "config.yaml"

    def _get_config_dir(self) -> Path:
        """Get XDG-compliant configuration directory."""
        if config_home := os.environ.get("XDG_CONFIG_HOME"):
            return Path(config_home) / "tistar"
        return Path.home() / ".config" / "tistar"

    def _create_default_config(self) -> None:
        """Create default configuration file with helpful comments."""
        self.config_dir.mkdir(parents=True, exist_ok=True)

        d = Config().model_dump(exclude={"config_path"})

        config_content = f"""# tistar configuration
# Defaults for sampling, tolerances and lattices. Every value can be
# overridden per run with the matching CLI flag.

# Random momentum samples for pointwise predicates
sampling:
  seed: {d['sampling']['seed']}  # Recorded in every report
  box_radius: {d['sampling']['box_radius']}  # Momenta drawn from [-r, r]^m
  pairs: {d['sampling']['pairs']}  # (p, q) pairs per predicate
  triples: {d['sampling']['triples']}  # (p0, p1, p2) triples for the cocycle check

# Residual thresholds (residuals are scaled by 1 + magnitude of the terms)
tolerances:
  predicate: {d['tolerances']['predicate']}
  harmonic: {d['tolerances']['harmonic']}
  equivalence: {d['tolerances']['equivalence']}
  witness: {d['tolerances']['witness']}
  star: {d['tolerances']['star']}
  identity: {d['tolerances']['identity']}

# Momentum lattice for star products and witness recovery
grid:
  dim: {d['grid']['dim']}  # Momentum dimension m
  points: {d['grid']['points']}  # Odd number of points per axis
  step: {d['grid']['step']}  # Lattice spacing dp

# Loop-momentum lattice for amplitudes
loop:
  mass2: {d['loop']['mass2']}  # Euclidean mass squared
  points: {d['loop']['points']}
  step: {d['loop']['step']}
  max_terms: {d['loop']['max_terms']}  # Refuse loop sums larger than this

# Space-time commutator matrix
finite_difference:
  step: {d['finite_difference']['step']}
  richardson: {str(d['finite_difference']['richardson']).lower()}

# Worker pool
execution:
  threads: {d['execution']['threads']}
  chunk_size: {d['execution']['chunk_size']}  # Output modes per work item

# Logging Configuration
logging:
  level: "{d['logging']['level']}"  # DEBUG, INFO, WARNING, ERROR, CRITICAL
  file: null  # Log file path (null for no file logging)
  format: "{d['logging']['format']}"
  backup_count: {d['logging']['backup_count']}
"""

        with open(self.config_file, "w") as f:
            f.write(config_content)

        logger.info(f"Created default configuration at {self.config_file}")

    def load_config(self) -> Config:
        """Load configuration from file or create defaults."""
        if not self.config_file.exists():
            self._create_default_config()

        try:
            with open(self.config_file) as f:
                config_data = yaml.safe_load(f) or {}

            config = Config(**config_data)
            config.config_path = self.config_file
            return config

        except Exception as e:
            logger.error(f"Failed to load config: {e}")
            raise RuntimeError(f"Configuration error: {e}") from e

    def save_config(self, config: Config) -> None:
        """Save configuration to file."""
        self.config_dir.mkdir(parents=True, exist_ok=True)
        config_dict = config.model_dump(exclude={"config_path"})

        with open(self.config_file, "w") as f:
            yaml.dump(config_dict, f, default_flow_style=False, indent=2)

        logger.info(f"Saved configuration to {self.config_file}")

    def get_value(self, key: str) -> Any:
        """Get configuration value by dot notation key."""
        value: Any = self.load_config().model_dump(exclude={"config_path"})

        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                raise KeyError(f"Configuration key '{key}' not found")

        return value

    def set_value(self, key: str, value: Union[str, int, float, bool]) -> None:
        """Set configuration value by dot notation key."""
        config = self.load_config()
        config_dict = config.model_dump(exclude={"config_path"})

        keys = key.split(".")
        current = config_dict

        for k in keys[:-1]:
            if k not in current or not isinstance(current[k], dict):
                raise KeyError(f"Configuration key '{key}' not found")
            current = current[k]

        if keys[-1] not in current:
            raise KeyError(f"Configuration key '{key}' not found")

        current[keys[-1]] = _coerce(value)

        new_config = Config(**config_dict)
        new_config.config_path = config.config_path
        self.save_config(new_config)

    def reset_to_defaults(self) -> None:
        """Reset configuration to defaults."""
        if self.config_file.exists():
            backup_path = self.config_file.with_suffix(".yaml.backup")
            shutil.copy(self.config_file, backup_path)
            logger.info(f"Backed up existing config to {backup_path}")

        self._create_default_config()

    def validate_config(self) -> tuple[bool, list[str]]:
        """Validate current configuration and return issues."""
        issues = []

        try:
            config = self.load_config()

            grid_terms = config.grid.points ** (2 * config.grid.dim)
            if grid_terms > 10**10:
                issues.append(
                    f"Grid {config.grid.dim}x{config.grid.points} needs {grid_terms:.2e} "
                    "terms per star product"
                )

            # loop lattices span the generator dimension, configured as grid.dim
            loop_terms = config.loop.points**config.grid.dim
            if loop_terms > config.loop.max_terms:
                issues.append(
                    f"Loop lattice of {loop_terms} points exceeds loop.max_terms "
                    f"({config.loop.max_terms})"
                )

            if config.tolerances.harmonic > config.tolerances.equivalence:
                issues.append(
                    "Harmonic tolerance is looser than the equivalence tolerance"
                )

            return len(issues) == 0, issues

        except Exception as e:
            return False, [f"Configuration validation failed: {e}"]


def _coerce(value: Union[str, int, float, bool]) -> Union[str, int, float, bool, None]:
    """Convert CLI strings to the YAML scalar they spell."""
    if not isinstance(value, str):
        return value
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("null", "none"):
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


# Global configuration instance
_config_manager: Optional[ConfigManager] = None
_config: Optional[Config] = None


def get_config_manager() -> ConfigManager:
    """Get global configuration manager instance."""
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def get_config() -> Config:
    """Get global configuration instance."""
    global _config
    if _config is None:
        _config = get_config_manager().load_config()
    return _config


def reload_config() -> Config:
    """Reload configuration from file."""
    global _config
    _config = get_config_manager().load_config()
    return _config
