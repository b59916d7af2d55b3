from pathlib import Path
from typing import Literal, Optional, Union

from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

from .errors import ConfigError


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        toml_file="treeshapes.toml",
        case_sensitive=False,
        extra="ignore",
    )

    # Exhaustive work (generate_all, build_hasse, exact_kernel)
    exhaustive_cap: int = 9
    # Subset enumeration is 2^G(N)
    bottleneck_cap: int = 5

    # Statistics
    cherry_max: int = 6

    # Sampling
    thinning: int = 1
    threads: int = 1
    coalescent_chunk: int = 1000

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Explicit kwargs first, then the TOML file. Environment variables are never read."""
        return (
            init_settings,
            TomlConfigSettingsSource(settings_cls),
        )


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    if path is None:
        return Settings()
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {config_path}")
    values = TomlConfigSettingsSource(Settings, toml_file=config_path)()
    return Settings(**values)


settings = Settings()
