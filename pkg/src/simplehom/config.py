"""Configuration management for simplehom."""

import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Type

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict
from sympy import isprime

from .cyclotomic import default_embedding
from .exceptions import ConfigurationError, InvalidParameterError


class RepresentationConfig(BaseModel):
    """Which representation to study."""

    p: int = Field(7, description="Odd prime >= 5")
    j: Optional[int] = Field(None, description="Embedding index; None picks the one closest to A = exp(i*pi/6)")


class SearchConfig(BaseModel):
    """Budgets for enumerations and searches."""

    bfs_cap: int = Field(1_000_000, description="Maximum number of canonical forms in a BFS")
    max_cover_degree: int = Field(5_000, description="Largest cover whose homology is computed")
    snf_transform_limit: int = Field(400, description="Largest matrix dimension for which U, V are tracked")
    schottky_max_power: int = Field(20, description="Largest power tried in the ping-pong search")
    schottky_samples: int = Field(1000, description="Boundary sample points per disk")
    order_scan_limit: Optional[int] = Field(None, description="Override for the projective order scan bound")


class SuiteConfig(BaseModel):
    """Parameters of the verification suite."""

    seed: int = Field(0, description="Seed for randomized checks")
    torsion_trials: int = Field(50, description="Random conjugates in the torsion check")
    commutator_pairs: int = Field(100, description="Random commutator pairs")
    depth_law_max_checks: int = Field(10_000, description="Cap on powers of psi checked")
    fast_bfs_cap: int = Field(20_000, description="BFS budget used by the fast suite")
    fast_max_level: int = Field(1, description="Highest cover level built by the fast suite")


class OutputConfig(BaseModel):
    """Report output."""

    format: Literal["json", "text"] = Field("json", description="Report format")


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = Field("WARNING", description="Logging level")
    format: str = Field(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Log format string"
    )
    file_path: Optional[str] = Field(None, description="Path to log file")
    max_file_size: int = Field(10 * 1024 * 1024, description="Maximum log file size in bytes")
    backup_count: int = Field(5, description="Number of backup log files to keep")
    console_output: bool = Field(True, description="Enable console logging")


class Settings(BaseSettings):
    """Main application settings."""

    app_name: str = Field("simplehom", description="Application name")
    debug: bool = Field(False, description="Enable debug mode")

    representation: RepresentationConfig = Field(default_factory=RepresentationConfig)
    search: SearchConfig = Field(default_factory=SearchConfig)
    suite: SuiteConfig = Field(default_factory=SuiteConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    model_config = SettingsConfigDict(
        env_prefix="SIMPLEHOM_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # config-file values arrive as init kwargs and lose to the environment
        return env_settings, dotenv_settings, init_settings, file_secret_settings


def _load_config_file(config_file: Path) -> Dict[str, Any]:
    """Load configuration from YAML or JSON file."""
    if not config_file.exists():
        return {}

    with open(config_file, "r") as f:
        if config_file.suffix.lower() in [".yaml", ".yml"]:
            return yaml.safe_load(f) or {}
        elif config_file.suffix.lower() == ".json":
            return json.load(f)
        else:
            raise ConfigurationError(
                f"Unsupported config file format: {config_file.suffix}",
                context={"path": str(config_file)}
            )


@lru_cache()
def load_settings(
    config_dir: Optional[Path] = None,
    env_file: Optional[str] = None,
    config_file: Optional[str] = None
) -> Settings:
    """
    Load application settings from multiple sources.

    Sources are loaded in order of precedence (later sources override earlier):
    1. Default values
    2. Configuration file (YAML/JSON)
    3. Environment file (.env)
    4. Environment variables (SIMPLEHOM_ prefix, ``__`` between sections)

    Args:
        config_dir: Directory containing config files (default: current directory)
        env_file: Path to environment file (default: .env in config_dir)
        config_file: Path to configuration file (default: config.yaml in config_dir)

    Returns:
        Loaded settings instance
    """
    if config_dir is None:
        config_dir = Path.cwd()

    env_path = config_dir / ".env" if env_file is None else Path(env_file)
    config_path = config_dir / "config.yaml" if config_file is None else Path(config_file)

    if env_path.exists():
        load_dotenv(env_path, override=False)
    file_config = _load_config_file(config_path)

    try:
        return Settings(**file_config)
    except ValidationError as e:
        raise ConfigurationError(f"Failed to load configuration: {e}", cause=e)


class RunConfig(BaseModel):
    """Validated parameters of one command; embedded in every report."""

    p: int = 7
    j: Optional[int] = None
    k: Optional[int] = None
    word: Optional[str] = None
    bfs_cap: int = 1_000_000
    format: Literal["json", "text"] = "json"
    seed: int = 0

    @field_validator("p")
    @classmethod
    def _odd_prime(cls, value: int) -> int:
        if value < 5 or not isprime(value):
            raise ValueError(f"p must be an odd prime >= 5, got {value}")
        return value

    @field_validator("k")
    @classmethod
    def _level(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 0:
            raise ValueError(f"k must be >= 0, got {value}")
        return value

    @field_validator("bfs_cap")
    @classmethod
    def _cap(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"bfs_cap must be >= 1, got {value}")
        return value

    @model_validator(mode="after")
    def _embedding(self) -> "RunConfig":
        if self.j is None:
            self.j = default_embedding(self.p)
        elif math.gcd(self.j, self.p) != 1:
            raise ValueError(f"embedding index {self.j} is not coprime to {self.p}")
        return self


def build_run_config(settings: Settings, **overrides: Any) -> RunConfig:
    """Merge command-line overrides (None means unset) over settings."""
    values: Dict[str, Any] = {
        "p": settings.representation.p,
        "j": settings.representation.j,
        "bfs_cap": settings.search.bfs_cap,
        "format": settings.output.format,
        "seed": settings.suite.seed,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**values)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        raise InvalidParameterError(messages, cause=e, context={"values": values})
