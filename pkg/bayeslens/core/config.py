"""Library and CLI configuration."""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Settings from environment variables (prefix ``BAYESLENS_``) or ``.env``."""

    # Equality tolerances
    TOLERANCE: float = 1e-9
    SUPPORT_TOL: float = 1e-12  # FinStoch: pi(x) > SUPPORT_TOL counts as supported
    PINV_RCOND: float = 1e-10  # Gauss: relative singular-value cutoff
    GAUSS_TOLERANCE: float = 1e-8
    STOCHASTIC_TOL: float = 1e-9

    # GaussMap construction checks, relative to the covariance scale
    SYMMETRY_TOL: float = 1e-12
    PSD_TOL: float = 1e-10

    # Law harness
    LAW_SEED: int = 1
    LAW_CASES: int = 100
    LAW_MAX_DIM: int = 6
    LAW_SPARSITY: float = 0.3
    LAW_PRIORS_PER_CASE: int = 10
    LAW_WORKERS: int = 4
    SHRINK_ATTEMPTS: int = 100

    # Memoised supports and section maps, keyed by exact state
    STATE_CACHE_SIZE: int = 4096

    # Environment
    ENV: str = "development"
    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        env_prefix = "BAYESLENS_"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
