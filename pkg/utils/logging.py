"""Logging utilities for the depts engine."""

from __future__ import annotations

import logging
import sys

from config import LOG_FORMAT, LOG_LEVEL


def get_logger(name: str) -> logging.Logger:
    """Get a configured logger for a module."""
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.setLevel(LOG_LEVEL)
        logger.propagate = False  # Prevent duplicate logs from parent handlers
    return logger


# Pre-configured loggers for the main areas
app_logger = get_logger('depts')
train_logger = get_logger('depts.training')
period_logger = get_logger('depts.periodicity')


def set_level(level: int) -> None:
    """Change the level of the depts loggers and their handlers."""
    for logger in (app_logger, train_logger, period_logger):
        logger.setLevel(level)
        for handler in logger.handlers:
            handler.setLevel(level)
