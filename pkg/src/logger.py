"""
Logging configuration for the project.

This module provides a standardized logging setup for the library and the CLI.
Console output goes to stderr so JSON documents printed on stdout stay clean.
Importing the library never touches the filesystem: the daily log file under
logs/ is attached by the CLI entry point through enable_file_logging.

Usage:
    from src.logger import get_logger

    # Get a logger for the current module
    logger = get_logger(__name__)

    logger.debug("Truncated after %d terms", n_terms)
    logger.info("Fitting s=%s", s)
    logger.warning("Observed information is ill-conditioned")
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Union

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M:%S"

# loggers handed out by get_logger, so a late file handler reaches all of them
_project_loggers: List[logging.Logger] = []
_file_handler: Optional[logging.FileHandler] = None


def _formatter() -> logging.Formatter:
    return logging.Formatter(fmt=LOG_FORMAT, datefmt=TIMESTAMP_FORMAT)


# Create logs directory if it doesn't exist
def ensure_logs_directory(logs_dir: Union[str, Path] = "logs") -> Path:
    """Create logs directory if it doesn't exist"""
    logs_dir = Path(logs_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)
    return logs_dir


# Configure logging
def get_logger(name, level=logging.INFO):
    """
    Get a logger configured with standardized settings.

    Args:
        name (str): Name for the logger, typically __name__
        level (int): Logging level (default: logging.INFO)

    Returns:
        logging.Logger: Configured logger instance
    """
    logger = logging.getLogger(name)

    # Only configure handlers if not already configured
    if not logger.handlers:
        logger.setLevel(level)

        # Console handler (INFO and above)
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.INFO)
        console_handler.setFormatter(_formatter())
        logger.addHandler(console_handler)

        if _file_handler is not None:
            logger.addHandler(_file_handler)
        logger.propagate = False
        _project_loggers.append(logger)

    return logger


def enable_file_logging(logs_dir: Union[str, Path] = "logs") -> logging.FileHandler:
    """Attach one daily DEBUG file handler, logs/<date>.log, to every project logger"""
    global _file_handler
    if _file_handler is None:
        directory = ensure_logs_directory(logs_dir)
        current_date = datetime.now().strftime("%Y-%m-%d")
        _file_handler = logging.FileHandler(
            directory / f"{current_date}.log", encoding="utf-8"
        )
        _file_handler.setLevel(logging.DEBUG)
        _file_handler.setFormatter(_formatter())
        for logger in _project_loggers:
            logger.addHandler(_file_handler)
    return _file_handler


def disable_file_logging() -> None:
    global _file_handler
    if _file_handler is None:
        return
    for logger in _project_loggers:
        logger.removeHandler(_file_handler)
    _file_handler.close()
    _file_handler = None


def set_console_level(level):
    """Change the console threshold of every logger created by get_logger"""
    for logger in _project_loggers:
        logger.setLevel(min(logger.level, level))
        for handler in logger.handlers:
            if isinstance(handler, logging.StreamHandler) and not isinstance(
                handler, logging.FileHandler
            ):
                handler.setLevel(level)
