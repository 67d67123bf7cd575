"""Configuration settings for the RES sizing toolkit."""

import logging
from functools import lru_cache
from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", extra="ignore")

    # Resource fetcher (renewables.ninja)
    RESSIZE_NINJA_TOKEN: str = ""
    NINJA_API_BASE: str = "https://www.renewables.ninja/api/"
    NINJA_TIMEOUT_S: float = 60.0
    RESOURCE_CACHE_DIR: str = "./data/cache"

    # Solver settings
    SOLVER_BACKEND: Literal["simplex", "highs"] = "simplex"
    SOLVER_FEAS_TOL: float = 1e-7
    SOLVER_OPT_TOL: float = 1e-7
    SOLVER_PIVOT_TOL: float = 1e-9
    SOLVER_MAX_ITERS: int = 0  # 0 means 50 * (rows + cols)
    SOLVER_STALL_WINDOW: int = 50
    SOLVER_REFACTOR_EVERY: int = 100

    # Problem scaling
    SCALING_PASSES: int = 4

    # Sweeps
    SWEEP_JOBS: int = 1

    # Logging
    LOG_LEVEL: str = "INFO"

    # API settings
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 8000


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


def configure_logging(level: str = "") -> None:
    """Configure root logging once for CLI and service entry points.

    Args:
        level: Level name; falls back to ``LOG_LEVEL`` from settings
    """
    level = (level or get_settings().LOG_LEVEL).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
