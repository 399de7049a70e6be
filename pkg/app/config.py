from typing import Optional, Tuple, Type
from pydantic import Field
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime settings for the sweep tool.

    The tool reads no environment variables and no dotenv files: the only source
    is the keyword arguments given at construction (the CLI builds them from its
    flags).
    """

    model_config = SettingsConfigDict(extra="ignore", frozen=True)

    # Service Configuration
    service_name: str = Field(default="polariton-sweep")
    log_level: str = Field(default="INFO")

    # Worker Configuration
    worker_count: int = Field(default=1, ge=1)
    chunk_size: int = Field(default=256, ge=1)

    # Output Configuration
    csv_significant_digits: int = Field(default=17, ge=1, le=17)
    metrics_file: Optional[str] = Field(default=None)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings,)

    @property
    def csv_float_format(self) -> str:
        """Format spec for CSV floats in scientific notation."""
        return f".{self.csv_significant_digits - 1}e"


# Global settings instance
settings = Settings()
