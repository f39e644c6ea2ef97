"""Logging setup for the command line tools.

The library modules only create loggers; handlers are installed here, from
the ``FUSETRACK_LOG`` environment variable.
"""
import logging
import os

LOG_ENV = 'FUSETRACK_LOG'
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def get_log_level(default=logging.WARNING):
    """
    Log level requested through FUSETRACK_LOG

    Arguments:
        * default (int): level used when the variable is unset or unknown

    Returns:
        * level (int): logging level
    """
    name = os.getenv(LOG_ENV, '').strip().upper()
    if not name:
        return default
    level = logging.getLevelName(name)
    if isinstance(level, int):
        return level
    return default


def configure_logging(stream=None):
    """Install a stderr handler on the ``fusetrack`` logger."""
    logger = logging.getLogger('fusetrack')
    logger.setLevel(get_log_level())
    if not logger.handlers:
        handler = logging.StreamHandler(stream)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    return logger
