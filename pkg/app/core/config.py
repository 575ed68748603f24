"""
Process settings.

Uses pydantic-settings for environment variable loading. Experiment
parameters live in app.schemas.config.RunConfig; this module only holds what
varies per machine or per invocation (log format, thread count, seed override).
"""

from functools import lru_cache
from typing import Literal, Optional

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.exceptions import ConfigError


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # App
    app_name: str = "RAVN Testbed"
    app_env: Literal["development", "production"] = "development"
    debug: bool = False

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    log_format: Literal["console", "json"] = "console"

    # Reproducibility
    ravn_seed: Optional[int] = None  # RAVN_SEED overrides the config seed
    torch_threads: int = 1

    @property
    def is_production(self) -> bool:
        return self.app_env == "production"

    @property
    def use_json_logs(self) -> bool:
        return self.log_format == "json" or self.is_production


def load_settings() -> Settings:
    """Read settings from the environment; a bad value raises ConfigError naming its variable."""
    try:
        return Settings()
    except ValidationError as e:
        error = e.errors()[0]
        variable = str(error["loc"][0]).upper() if error["loc"] else None
        raise ConfigError(f"Invalid environment variable {variable}: {error['msg']}", key=variable) from e


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return load_settings()
