"""Logging configuration model."""

import logging
from enum import Enum

from pydantic import BaseModel, Field, field_validator


class LogLevel(str, Enum):
    """Valid Python logging levels."""

    CRITICAL = "CRITICAL"
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"
    DEBUG = "DEBUG"

    def as_int(self) -> int:
        """Return the numeric level understood by the logging module."""
        return logging.getLevelNamesMapping()[self.value]


class LoggingConfig(BaseModel):
    """
    Configuration for the stderr log handler.

    Reports are written to stdout or to files; logs always go to stderr so the two never mix.
    """

    LOG_LEVEL: LogLevel = LogLevel.WARNING
    LOG_FORMAT: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        min_length=1,
        description="Python logging format string (plain-text handler only)",
    )
    LOG_DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"
    LOG_JSON: bool = Field(default=False, description="Emit log records as JSON lines")

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_format_string(cls, v: str) -> str:
        """
        Validate that the format string renders against a dummy record.

        Parameters
        ----------
        v : str
            The log format string to validate.

        Returns
        -------
        str
            The validated format string.

        Raises
        ------
        ValueError
            If formatting a record with it fails.
        """
        record = logging.LogRecord(
            name="format-check",
            level=logging.INFO,
            pathname="",
            lineno=0,
            msg="format check",
            args=(),
            exc_info=None,
        )
        record.asctime = "1970-01-01 00:00:00"
        record.message = record.getMessage()
        try:
            _ = v % record.__dict__
        except (KeyError, ValueError, TypeError) as e:
            raise ValueError(f"Invalid log format string: {e}") from e
        return v
