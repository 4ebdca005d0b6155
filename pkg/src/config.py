"""
Runtime settings
Read from THETA_ORBIFOLD_* environment variables and an optional .env file
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="THETA_ORBIFOLD_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    threads: int = Field(1, ge=1, description="Worker threads for sector evaluation")
    seed: int = Field(20240607, description="Seed for randomized checks")
    default_order: int = Field(4, ge=1, description="Truncation order when --order is absent")
    h2_max_order: int = Field(8, ge=1, description="Largest |G| accepted by h2_compute")
    brute_force_limit: int = Field(2 ** 20, ge=1, description="Largest cochain space enumerated by oracles")
    primitive_root_power: int = Field(1, description="Unit c with x = zeta_n^c in discrete-torsion phases")
    log_level: str = Field("WARNING", description="Root logging level")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
