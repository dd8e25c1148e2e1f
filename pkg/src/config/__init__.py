import functools
from pathlib import Path

from config.helpers.config_parser import parse_yaml_file_as_dict
from config.models.consolidated import AppConfig
from utils.logging_helpers import get_logger

logger = get_logger(__name__)


@functools.cache
def get_config(config_path: Path | None = None) -> AppConfig:
    """
    Get the app configuration.

    Parameters
    ----------
    config_path : Path, optional
        An explicit YAML settings file. Its values take precedence over the project's config.yaml.

    Returns
    -------
    AppConfig
        The validated configuration, cached per ``config_path``.
    """
    overrides = parse_yaml_file_as_dict(config_path) if config_path is not None else {}
    if overrides is None:
        # Empty YAML document
        overrides = {}
    config = AppConfig(**overrides)
    logger.debug("Loaded configuration from %s", config_path or "project defaults")
    return config


if __name__ == "__main__":
    print(get_config().model_dump_json(indent=4))
