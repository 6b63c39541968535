from functools import lru_cache
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # App settings
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Replicate loops (bootstrap, coverage). THREADS never changes results.
    THREADS: Optional[int] = Field(default=None, ge=1)
    CHUNK_SIZE: int = Field(default=250, ge=1)
    DEFAULT_SEED: int = Field(default=20240917, ge=0, lt=2**64)

    model_config = SettingsConfigDict(
        env_prefix="ASYMM_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """
    Returns the process-wide settings instance.

    Tests that change ASYMM_* variables call `get_settings.cache_clear()`.
    """
    return Settings()

