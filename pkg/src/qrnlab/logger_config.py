#!/usr/bin/env python
"""
Logger configuration module for qrnlab.

This module provides centralized logging configuration using loguru with both
console and file output. It supports environment-based configuration and
dynamic log level adjustment.

Features:
- Automatic log directory creation
- Unique log files per execution with timestamps
- File rotation and compression
- Color-coded console output
- Environment variable configuration (QRN_LOG_DIR, QRN_LOG_LEVEL)
"""

import os
import sys
from datetime import datetime
from pathlib import Path

from loguru import logger

# Log directory, overridable via QRN_LOG_DIR
_log_dir = Path(os.getenv("QRN_LOG_DIR", Path.cwd() / "logs"))
_log_dir.mkdir(parents=True, exist_ok=True)

# One log file per process
_log_file = _log_dir / f"qrnlab_{datetime.now().strftime('%Y%m%d_%H%M%S')}_{os.getpid()}.log"

_CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
_FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {name}:{function}:{line} - {message}"


def _install_handlers(console_level: str) -> None:
    logger.remove()
    logger.add(
        sys.stderr,
        level=console_level.upper(),
        format=_CONSOLE_FORMAT,
        colorize=True,
        backtrace=True,
        diagnose=True,
    )
    # File handler always keeps DEBUG so per-sample diagnostics survive a quiet console
    logger.add(
        _log_file,
        level="DEBUG",
        rotation="10 MB",
        retention="7 days",
        compression="zip",
        format=_FILE_FORMAT,
        backtrace=True,
        diagnose=True,
    )


_install_handlers(os.getenv("QRN_LOG_LEVEL", "INFO"))


def set_logger_level(level: str) -> None:
    """
    Dynamically adjust the console log level.

    Parameters
    ----------
    level : str
        One of 'DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'.

    Note
    ----
    This function recreates all log handlers. The file handler keeps DEBUG level.
    """
    _install_handlers(level)


def get_log_file_path() -> Path:
    """Return the current log file path."""
    return _log_file


def get_log_directory() -> Path:
    """Return the log directory path."""
    return _log_dir


# Export public interface
__all__ = ["logger", "set_logger_level", "get_log_file_path", "get_log_directory"]
