from __future__ import annotations

import logging
import sys
from enum import StrEnum
from typing import TYPE_CHECKING

from pythonjsonlogger.json import JsonFormatter

if TYPE_CHECKING:
    from config.models.logging import LoggingConfig


def get_logger(name: str) -> logging.Logger:
    """Get logger instance."""
    return logging.getLogger(name)


def configure_logging(config: LoggingConfig) -> None:
    """
    Install a single stderr handler on the root logger.

    Parameters
    ----------
    config : LoggingConfig
        Level and formatting. With ``LOG_JSON`` every record (including ``extra=`` fields) is a JSON line.
    """
    handler = logging.StreamHandler(sys.stderr)
    if config.LOG_JSON:
        formatter: logging.Formatter = JsonFormatter(
            "%(asctime)s %(name)s %(levelname)s %(message)s",
            datefmt=config.LOG_DATE_FORMAT,
        )
    else:
        formatter = logging.Formatter(config.LOG_FORMAT, datefmt=config.LOG_DATE_FORMAT)
    handler.setFormatter(formatter)

    root = logging.getLogger()
    for existing in list(root.handlers):
        root.removeHandler(existing)
    root.addHandler(handler)
    root.setLevel(config.LOG_LEVEL.as_int())


class ProgressStage(StrEnum):
    """Enumeration of progress stages for logging."""

    STARTED = "STARTED"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


def log_progress(
    logger: logging.Logger,
    stage_name: str,
    stage: ProgressStage = ProgressStage.STARTED,
    level: int = logging.DEBUG,
    **fields,
) -> None:
    """Log the current stage of a pipeline; keyword fields are attached as structured ``extra`` data."""
    logger.log(level, "Stage %s: %s", stage_name, stage, extra={"stage": stage_name, "status": str(stage), **fields})
