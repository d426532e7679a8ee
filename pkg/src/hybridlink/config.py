"""
Configuration management for hybridlink.

Uses pydantic-settings to load configuration from environment variables and .env files.
"""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Units
    omega_q_default: float = Field(
        default=50.0,
        gt=0,
        description="Default qubit splitting in units of the molecular linewidth",
    )
    linewidth_mhz: float = Field(
        default=20.0,
        gt=0,
        description="Molecular linewidth gamma/2pi in MHz (unit conversion constant)",
    )

    # Linear algebra and integration
    integrator_tol: float = Field(
        default=1e-9,
        gt=0,
        description="Local error tolerance of the master-equation integrator",
    )
    singular_threshold: float = Field(
        default=1e-14,
        gt=0,
        description="Relative determinant threshold below which a 4x4 matrix is singular",
    )
    oracle_tolerance: float = Field(
        default=0.1,
        gt=0,
        description="Relative band for closed vs numeric element products",
    )

    # Dephasing
    dephasing_model: str = Field(
        default="printed",
        description="Light-induced dephasing model: 'printed' or 'effective'",
    )
    anchor_fidelity: float = Field(
        default=0.90,
        gt=0,
        le=1,
        description="Bell fidelity anchor used to back-solve the effective dephasing",
    )
    anchor_n_bar: float = Field(
        default=1.5,
        gt=0,
        description="Mean photon number of the fidelity anchor",
    )

    # Monte Carlo
    mc_block_size: int = Field(
        default=65536,
        gt=0,
        description="Trials per independent random stream block",
    )
    default_seed: int = Field(
        default=20240601,
        ge=0,
        description="Seed used when a scenario does not name one",
    )

    # Electrostatics
    stark_mhz_per_kv_m: float = Field(
        default=5.0,
        description="Linear Stark coefficient in MHz per kV/m per Debye",
    )
    fd_spacing_nm: float = Field(
        default=15.0,
        gt=0,
        description="Default finite-difference core grid spacing in nm",
    )
    fd_method: str = Field(
        default="cg",
        description="Laplace solver: 'cg' (sparse conjugate gradient) or 'sor'",
    )
    fd_tolerance: float = Field(
        default=1e-10,
        gt=0,
        description="Relative residual tolerance of the Laplace solve",
    )
    fd_max_iter: int = Field(
        default=20000,
        gt=0,
        description="Iteration cap of the Laplace solve",
    )

    # Cache Configuration
    cache_enabled: bool = Field(
        default=True,
        description="Enable caching of electrostatics solves",
    )
    cache_dir: Path = Field(
        default=Path.home() / ".cache" / "hybridlink",
        description="Directory for cache storage",
    )

    # Logging Configuration
    log_level: str = Field(
        default="INFO",
        description="Logging level",
    )

    @field_validator("cache_dir", mode="before")
    @classmethod
    def expand_cache_dir(cls, v: str | Path) -> Path:
        """Expand ~ in cache directory path."""
        if isinstance(v, str):
            return Path(v).expanduser()
        return v.expanduser()

    @field_validator("log_level", mode="before")
    @classmethod
    def uppercase_log_level(cls, v: str) -> str:
        """Ensure log level is uppercase."""
        return v.upper() if isinstance(v, str) else v

    @field_validator("dephasing_model", "fd_method", mode="before")
    @classmethod
    def lowercase_choice(cls, v: str) -> str:
        """Normalize enumerated choices to lowercase."""
        return v.strip().lower() if isinstance(v, str) else v

    @field_validator("fd_method")
    @classmethod
    def check_fd_method(cls, v: str) -> str:
        if v not in ("cg", "sor"):
            raise ValueError(f"fd_method must be 'cg' or 'sor', got {v!r}")
        return v

    @field_validator("dephasing_model")
    @classmethod
    def check_dephasing_model(cls, v: str) -> str:
        if v not in ("printed", "effective"):
            raise ValueError(f"dephasing_model must be 'printed' or 'effective', got {v!r}")
        return v

    def ensure_cache_dir(self) -> Path:
        """Ensure cache directory exists and return its path."""
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        return self.cache_dir


# Global settings instance
settings = Settings()
