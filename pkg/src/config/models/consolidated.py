from pydantic import Field

from config.helpers.base import BaseConfigModel
from config.models.logging import LoggingConfig
from config.models.run import RunDefaults
from config.models.tolerances import Tolerances


class AppConfig(BaseConfigModel):
    """
    Main application configuration model that consolidates all configuration sections.

    Attributes
    ----------
    SERVICE_NAME : str
        Name reported in logs, defaults to "wigner-reconstruct".
    TOLERANCES : Tolerances
        Numerical thresholds (zero, norm, equality, verification).
    RUN : RunDefaults
        Sample counts, seed, worker count and scrambling defaults for CLI runs.
    LOGGING : LoggingConfig
        Log level and formatting.

    Notes
    -----
    This class inherits from BaseConfigModel, which provides configuration source
    priority handling (explicit values > config.yaml > defaults).
    """

    SERVICE_NAME: str = "wigner-reconstruct"
    TOLERANCES: Tolerances = Field(default_factory=Tolerances)
    RUN: RunDefaults = Field(default_factory=RunDefaults)
    LOGGING: LoggingConfig = Field(default_factory=LoggingConfig)
