"""Configuration management: environment settings, run files and logging."""

import os
import sys
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ternsense.baseline.models import BpConfig
from ternsense.network.models import NetworkConfig
from ternsense.training.models import TrainConfig

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

ModelT = TypeVar("ModelT", bound=BaseModel)


@dataclass
class Settings:
    """Process-wide settings with validation."""
    log_level: str = "INFO"
    log_to_file: bool = False
    log_dir: str = "logs"

    def __post_init__(self):
        """Validate configuration after initialization."""
        errors = []

        self.log_level = self.log_level.upper()
        if self.log_level not in LOG_LEVELS:
            errors.append(f"LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")

        if self.log_to_file and not self.log_dir:
            errors.append("LOG_DIR is required when LOG_TO_FILE is true")

        if errors:
            error_message = "Configuration errors:\n" + "\n".join(f"  - {e}" for e in errors)
            raise ValueError(error_message)


def load_settings() -> Settings:
    """
    Load settings from environment variables.

    Loads from .env file if present, then from environment variables.

    Returns:
        Settings object with validated values
    """
    load_dotenv()

    return Settings(
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        log_to_file=os.getenv("LOG_TO_FILE", "false").lower() in ("true", "1", "yes"),
        log_dir=os.getenv("LOG_DIR", "logs"),
    )


def setup_logging(settings: Settings):
    """
    Configure application logging.

    Logs go to stderr so stdout stays free for command output; with
    LOG_TO_FILE they are also appended to LOG_DIR/ternsense.log.
    """
    handlers = [logging.StreamHandler(sys.stderr)]

    if settings.log_to_file:
        os.makedirs(settings.log_dir, exist_ok=True)
        handlers.append(logging.FileHandler(os.path.join(settings.log_dir, "ternsense.log")))

    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='%(asctime)s [%(levelname)s] %(name)s: %(message)s',
        handlers=handlers
    )


class DataConfig(BaseModel):
    """Patch sampling and evaluation stride."""
    model_config = ConfigDict(extra='forbid', frozen=True)

    patches: int = Field(200_000, ge=2, description="Random training patches to sample")
    stride: int = Field(2, ge=1, description="Stride between evaluation patches")


class RunConfig(BaseModel):
    """Run file contents; every section is optional."""
    model_config = ConfigDict(extra='forbid')  # Catch typos in YAML

    network: Optional[NetworkConfig] = None
    training: Optional[TrainConfig] = None
    data: Optional[DataConfig] = None
    baseline: Optional[BpConfig] = None


def load_run_config(path) -> RunConfig:
    """
    Load and validate a YAML run file.

    Raises:
        ValueError: file unreadable or not a mapping
        ValidationError: unknown keys or invalid values
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            raw_data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as error:
        raise ValueError(f"Cannot read run file {path}: {error}") from error

    if raw_data is None:
        logger.warning(f"Empty run file: {path}")
        return RunConfig()
    if not isinstance(raw_data, dict):
        raise ValueError(f"Run file {path} must hold a mapping, got {type(raw_data).__name__}")

    run_config = RunConfig(**raw_data)
    logger.info(f"Loaded run file {path}")
    return run_config


def resolve(model: Type[ModelT], section: Optional[BaseModel], overrides: Dict[str, Any]) -> ModelT:
    """
    Layer built-in defaults, run-file values and explicit overrides.

    Only fields the run file actually sets take part, and only overrides
    that are not None.
    """
    values = section.model_dump(exclude_unset=True) if section is not None else {}
    values.update({key: value for key, value in overrides.items() if value is not None})
    return model(**values)


def field_default(model: Type[BaseModel], name: str) -> Any:
    return model.model_fields[name].default


__all__ = [
    "Settings",
    "load_settings",
    "setup_logging",
    "DataConfig",
    "RunConfig",
    "load_run_config",
    "resolve",
    "field_default",
    "ValidationError",
]
