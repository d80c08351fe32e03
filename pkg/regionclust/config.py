"""General configuration.

Config: process wide settings
"""

import logging
import sys
from pathlib import Path
from typing import Literal

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import (
    BaseSettings,
    DotEnvSettingsSource,
    EnvSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)
from pydantic_settings.sources import SettingsError

BASE_PATH = Path(__file__).parent.parent

LogLevel = Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Config(BaseSettings):
    """A general configuration setup to read either .env or REGIONCLUST_ environment keys."""

    # Logging
    LOG_LEVEL: LogLevel = "INFO"
    RICH_TRACEBACKS: bool = True

    # Factorization
    FACTOR_REFRESH_UPDATES: int = Field(default=64, ge=1)
    FACTOR_CACHE_RATIO: int = Field(default=2, ge=1)
    PIVOT_TOLERANCE: float = Field(default=1e-10, gt=0)

    # Oracle budget defaults
    ORACLE_MAX_NODES: int = Field(default=8, ge=1)
    ORACLE_MAX_TREES: int = Field(default=10**6, ge=1)
    ORACLE_MAX_PARTITIONS: int = Field(default=10**6, ge=1)

    # Simulation sweep
    SWEEP_WORKERS: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_file=f"{BASE_PATH}/.env",
        env_prefix="REGIONCLUST_",
        extra="ignore",
    )

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def upper_log_level(cls, value: str) -> str:
        return value.upper() if isinstance(value, str) else value

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,  # noqa: ARG003
        dotenv_settings: PydanticBaseSettingsSource,  # noqa: ARG003
        file_secret_settings: PydanticBaseSettingsSource,  # noqa: ARG003
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            EnvSettingsSource(settings_cls),
            DotEnvSettingsSource(settings_cls),
        )


try:
    config = Config()
except (ValidationError, SettingsError):
    logging.exception("Configuration Error")
    sys.exit(1)
