from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List
from pydantic import Field, field_validator


class Settings(BaseSettings):
    """Compiler configuration, read from UIMLC_* environment variables and .env"""

    model_config = SettingsConfigDict(
        env_prefix="UIMLC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Diagnostics
    color: bool = False
    max_diagnostics: int = Field(default=50, ge=1)

    # Behavior engine
    dispatch_limit: int = Field(default=1000, ge=1)

    # Emitters
    wml_card_threshold: int = Field(default=9, ge=1)
    default_indent: int = Field(default=2, ge=0, le=8)

    # Performance
    max_workers: int = Field(default=3, ge=1)

    # Input hygiene
    max_file_size: int = Field(default=1048576, ge=1)
    allowed_extensions: str = "uiml,xml"

    # Render cache
    enable_caching: bool = True
    cache_ttl: int = Field(default=3600, ge=1)
    cache_size: int = Field(default=256, ge=1)

    # Logging
    log_level: str = "WARNING"

    # HTTP service
    api_host: str = "127.0.0.1"
    api_port: int = 8000

    @field_validator("allowed_extensions")
    @classmethod
    def validate_extensions(cls, v: str) -> str:
        if not any(ext.strip() for ext in v.split(",")):
            raise ValueError("at least one extension is required")
        return v

    @property
    def extension_list(self) -> List[str]:
        return [ext.strip().lstrip(".").lower() for ext in self.allowed_extensions.split(",") if ext.strip()]


# Singleton instance
settings = Settings()
