"""
Configuration Settings for Stable Match Lab
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Application
    app_name: str = "Stable Match Lab"
    debug: bool = False
    enable_docs: bool = True
    log_level: str = "WARNING"

    # HTTP surface
    api_host: str = "0.0.0.0"
    api_port: int = 8000

    # Oracle
    oracle_guard: int = 7

    # Experiments
    workers: int = 1
    output_dir: str = "reports"
    stat_tolerance_se: float = 3.0
    multiplicity_floor: float = 0.05
    cor2_constant: float = 1.0

    # Numerics
    tail_cutoff: float = 1e-12

    model_config = SettingsConfigDict(env_file=".env", env_prefix="MATCHLAB_", extra="ignore")


settings = Settings()
