from pydantic import BaseModel, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Dict, Literal, Optional


class Settings(BaseSettings):
    """Application configuration settings."""

    model_config = SettingsConfigDict(env_prefix="FOCIR_", env_file=".env", case_sensitive=False)

    # Diagnostics
    log: str = "error"  # Options: error, info, debug

    # Run defaults
    horizon: int = Field(50, ge=2)
    output_format: Literal["csv", "json"] = "csv"
    window: Optional[int] = Field(None, ge=1)

    # Order recovery
    alpha_xtol: float = Field(1e-12, gt=0)
    alpha_match_tol: float = Field(1e-8, gt=0)
    consistency_rtol: float = Field(1e-8, gt=0)
    residual_tol: float = Field(1e-6, gt=0)

    # Two-order scan
    scan_points: int = Field(2000, ge=16)
    lemma_xtol: float = Field(1e-12, gt=0)
    double_root_tol: float = Field(1e-12, gt=0)
    merge_tol: float = Field(1e-9, gt=0)
    rank_rtol: float = Field(1e-7, gt=0)

    # Workflows
    roundtrip_tol: float = Field(1e-6, gt=0)
    sampling_rtol: float = Field(1e-6, gt=0)
    commensurate_tol: float = Field(1e-9, gt=0)

    # Server Configuration
    host: str = "127.0.0.1"
    port: int = 8000
    debug: bool = False


TOLERANCE_FIELDS = (
    "alpha_xtol",
    "alpha_match_tol",
    "consistency_rtol",
    "residual_tol",
    "lemma_xtol",
    "double_root_tol",
    "merge_tol",
    "rank_rtol",
    "roundtrip_tol",
    "sampling_rtol",
    "commensurate_tol",
)


class RunConfig(BaseModel):
    """Per-run overrides loaded from a --config JSON file."""

    horizon: Optional[int] = Field(None, ge=2, description="Transfer-function horizon T (data length)")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="Tolerance overrides by settings name")
    output_format: Optional[Literal["csv", "json"]] = Field(None, description="Trace output format")
    window: Optional[int] = Field(None, ge=1, description="GL memory truncation window")

    @field_validator("tolerances")
    @classmethod
    def _known_positive(cls, value: Dict[str, float]) -> Dict[str, float]:
        for name, tol in value.items():
            if name not in TOLERANCE_FIELDS:
                raise ValueError(f"Unknown tolerance '{name}'. Must be one of: {', '.join(TOLERANCE_FIELDS)}")
            if not tol > 0:
                raise ValueError(f"Tolerance '{name}' must be positive, got {tol}")
        return value

    def apply(self, base: Settings) -> Settings:
        """Return a copy of ``base`` with this run's overrides applied."""
        update = dict(self.tolerances)
        if self.horizon is not None:
            update["horizon"] = self.horizon
        if self.output_format is not None:
            update["output_format"] = self.output_format
        if self.window is not None:
            update["window"] = self.window
        return base.model_copy(update=update)


# Global settings instance
settings = Settings()
