"""
Configuration management using pydantic-settings.

Loads ambient settings (logging, worker pool) from environment variables and
.env file. Analysis parameters are never read from the environment; they are
passed explicitly or come from command-line flags.
"""

from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Ambient settings loaded from ``WATERWAY_``-prefixed environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="WATERWAY_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "INFO"
    log_json: bool = False
    log_file: str | None = None

    # Subset fits
    max_workers: int = Field(default=1, ge=1)  # 1 runs candidate fits sequentially


# Global settings instance
settings = Settings()
