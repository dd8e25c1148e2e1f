"""Read an explicit YAML settings file (the CLI's ``--config``) into a plain mapping."""

from pathlib import Path

from pydantic import validate_call
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError


def parse_yaml_raw_as_dict(raw: str) -> dict | None:
    """Parse a YAML document, returning ``None`` for an empty document.

    Parameters
    ----------
    raw : str
        The YAML text.

    Raises
    ------
    ValueError
        If the text is not valid YAML or its top level is not a mapping.
    """
    reader = YAML(typ="safe", pure=True)  # YAML 1.2 support
    try:
        objects = reader.load(raw)
    except YAMLError as e:
        raise ValueError(f"Invalid YAML settings: {e}") from e
    if objects is not None and not isinstance(objects, dict):
        raise ValueError(f"Settings file must contain a mapping at top level, got {type(objects).__name__}")
    return objects


@validate_call
def parse_yaml_file_as_dict(file: Path) -> dict | None:
    """Parse a YAML settings file.

    Parameters
    ----------
    file : Path
        Absolute path, or path relative to the working directory.
    """
    return parse_yaml_raw_as_dict(file.expanduser().resolve().read_text())
