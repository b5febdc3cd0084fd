"""Application configuration."""

import logging

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Application configuration, read from ``SBC_*`` environment variables."""

    model_config = SettingsConfigDict(env_prefix="SBC_", frozen=True)

    log_level: str = "INFO"
    log_json: bool = True
    output_dir: str = "out"
    grid_size: int = 1024
    omega_prime_im: float = 1.0
    threads: int = 1
    seed: int = 0
    dilation: float = 1.2
    svg_hashsalt: str = "sbc"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        if not isinstance(logging.getLevelName(value.upper()), int):
            raise ValueError(f"unknown log level: {value}")
        return value.upper()

    @field_validator("grid_size")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value < 256 or value & (value - 1):
            raise ValueError("grid_size must be a power of two >= 256")
        return value

    @field_validator("threads")
    @classmethod
    def _positive_threads(cls, value: int) -> int:
        if value < 1:
            raise ValueError("threads must be positive")
        return value

    @field_validator("omega_prime_im", "dilation")
    @classmethod
    def _positive(cls, value: float) -> float:
        if not value > 0:
            raise ValueError("must be positive")
        return value
