"""Global numeric settings.

Every tolerance and default the library uses lives here, in one frozen
object. Nothing is read from the environment: a run is fully determined
by its command line and scenario file.

Usage:
    from config.settings import settings

    tol = settings.substitution_rtol * (1.0 + scale)
"""
from pydantic import BaseModel, ConfigDict, Field


class Settings(BaseModel):
    """Library configuration - tolerances, limits and run defaults."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # ========== Linear algebra ==========
    pinv_rtol: float = Field(1e-12, gt=0)
    cond_limit: float = Field(1e12, gt=1)

    # ========== Model validation ==========
    symmetry_rtol: float = Field(1e-12, gt=0)
    psd_rtol: float = Field(1e-10, gt=0)

    # ========== Substitution / strategies ==========
    substitution_rtol: float = Field(1e-8, gt=0)
    feasibility_atol: float = Field(1e-12, gt=0)
    generator_max_retries: int = Field(100, ge=1)

    # ========== Run defaults ==========
    default_seed: int = Field(0, ge=0, lt=2**64)
    default_runs: int = Field(100, ge=1)
    default_horizon: int = Field(5, ge=1)

    # ========== Logging ==========
    log_level: str = "WARNING"


# Global settings instance
settings = Settings()
