"""Configuration management for the toolkit."""

import logging
from typing import Any

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Settings(BaseSettings):
    """Toolkit defaults loaded from ``BELL_GAMMA_*`` environment variables.

    Nothing here is required: every value has a default and every value
    can be overridden by the corresponding command-line flag.
    """

    model_config = SettingsConfigDict(
        env_prefix="BELL_GAMMA_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    log_level: str = "WARNING"
    workers: int = Field(default=1, ge=1)  # Threads used by run_batch
    default_seed: int = Field(default=0, ge=0, lt=2**64)
    # Upper bound on pairs drawn per vectorized RNG call; bounds memory only,
    # the drawn stream is identical for any value.
    pair_chunk_size: int = Field(default=1_000_000, ge=1)
    metrics_file: str | None = None

    def __init__(self, **values: Any) -> None:
        """Allow instantiation without explicit arguments for env loading."""
        super().__init__(**values)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalize the level name and reject unknown levels.

        Args:
            v: Level name such as ``info`` or ``DEBUG``

        Returns:
            Upper-cased level name

        Raises:
            ValueError: If the name is not a standard logging level
        """
        normalized = v.strip().upper()
        if normalized not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {v!r}")
        return normalized

    @property
    def log_level_value(self) -> int:
        """Numeric logging level for ``log_level``."""
        return int(logging.getLevelName(self.log_level))

    def __repr__(self) -> str:
        return (
            f"Settings(log_level={self.log_level}, workers={self.workers}, "
            f"default_seed={self.default_seed}, pair_chunk_size={self.pair_chunk_size}, "
            f"metrics_file={self.metrics_file})"
        )
