"""
Logger setup for nlsground.
"""
import copy
import logging
import logging.config
from typing import Optional

from nlsground.config.settings import LOGGING


def setup_logging(level: Optional[str] = None) -> None:
    """Configure the logging system based on settings.

    Args:
        level: Optional level overriding the ``nlsground`` logger level
            (the CLI passes ``WARNING`` for ``--quiet``)
    """
    config = copy.deepcopy(LOGGING)
    if level:
        config["loggers"]["nlsground"]["level"] = level.upper()
    logging.config.dictConfig(config)


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the specified name.

    Args:
        name: Name for the logger

    Returns:
        Configured logger
    """
    return logging.getLogger(name)
