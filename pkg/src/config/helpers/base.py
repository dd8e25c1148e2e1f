from pathlib import Path
from typing import Any

from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    YamlConfigSettingsSource,
)

PROJECT_BASE_DIR = Path(__file__).resolve().parents[3]
PATH_CONFIG_YAML = Path(PROJECT_BASE_DIR, "config.yaml")

DEFAULT_CONFIG_SETTINGS = {
    # Due to a pydantic bug,case_sensitive has to be set to True. Nested models don't get sourced correctly if False
    "case_sensitive": True,
    "arbitrary_types_allowed": False,
    "extra": "ignore",
    "validate_by_name": True,
    "validate_by_alias": True,
}


def get_default_config_settings() -> dict[str, Any]:
    """
    Get the default configuration settings dictionary.

    Returns
    -------
    dict[str, Any]
        Dictionary containing default Pydantic settings configuration.

    Notes
    -----
    No env_file, env_nested_delimiter or secrets_dir is configured: a run is fully described by
    its flags and config files, never by the process environment.
    """
    return DEFAULT_CONFIG_SETTINGS


class BaseConfigModel(BaseSettings):
    """
    Base model for project's other pydantic settings models.

    - Provides base settings configurations (from get_default_config_settings)
    - Provides the sourcing priority: explicit init values > config.yaml > defaults
    """

    # pyrefly: ignore  # bad-argument-type
    model_config = SettingsConfigDict(**get_default_config_settings())

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """
        Prefer explicitly passed values, then the project's config.yaml.

        Environment, dotenv and secret sources are not consulted.

        Source - https://docs.pydantic.dev/latest/concepts/pydantic_settings/#changing-priority
        """
        yml_src = YamlConfigSettingsSource(settings_cls=settings_cls, yaml_file=PATH_CONFIG_YAML)
        return init_settings, yml_src
