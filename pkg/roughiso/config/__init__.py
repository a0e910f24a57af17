"""Runtime configuration for the toolkit."""
from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = "roughiso"
    settings_file: Path = Path("conf/settings.yaml")
    log_level: str = "INFO"
    jobs: int = 1
    stream_point_budget: int = 1 << 22
    stream_refill: int = 4096

    model_config = SettingsConfigDict(
        env_prefix="ROUGHISO_",
        env_file=".env",
        env_file_encoding="utf-8",
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
