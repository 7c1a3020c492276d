"""Process-level configuration using Pydantic Settings.

Experiment parameters live in YAML configs (see ``src.model.loader``); this module only
holds settings that belong to the running process: where outputs go, how verbose the
logs are and which bundled config is used when none is given.
"""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

BUNDLED_CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


class Settings(BaseSettings):
    """Application settings loaded from environment variables.

    All settings are loaded from .env file or environment variables prefixed with
    ``WGM_LAB_`` (e.g. ``WGM_LAB_OUTPUT_DIR``).
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="WGM_LAB_",
        case_sensitive=False,  # Allow uppercase env vars (standard convention)
        extra="ignore",
    )

    # Output Configuration
    output_dir: str = Field(
        default="./runs",
        description="Default directory for traces and reports (overridden by --out)",
    )
    report_format: str = Field(
        default="json",
        pattern="^(json|text)$",
        description="Report format printed by the CLI: json, text",
    )

    # Logging Configuration
    log_level: str = Field(
        default="INFO",
        description="Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL",
    )
    log_format: str = Field(
        default="%(asctime)s %(levelname)s %(name)s: %(message)s",
        description="Format string handed to logging.basicConfig",
    )

    # Experiment Defaults
    default_config: str = Field(
        default=str(BUNDLED_CONFIG_DIR / "prysoA.yaml"),
        description="Experiment config used when --config is not given",
    )
    default_seed: int = Field(
        default=0,
        ge=0,
        description="Seed for synthetic measurement noise when --seed is not given",
    )
    n_classes: int = Field(
        default=2001,
        ge=3,
        description="Default number of detuning classes in echo simulations",
    )

    @property
    def output_path(self) -> Path:
        """Output directory as a Path."""
        return Path(self.output_dir)


# Global settings instance
settings = Settings()
