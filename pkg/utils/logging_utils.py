#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Logging helpers for AttractorKit.

Everything logs through stdlib ``logging`` below the ``attractorkit``
namespace. Handlers write to stderr and optionally to a rotating file, so
stdout carries only the paths of written artifacts.
"""

import os
import logging
import logging.handlers
from datetime import datetime
from typing import Optional, Dict, Any

NAMESPACE = "attractorkit"
DEFAULT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_level: str = "INFO",
                  log_file: Optional[str] = None,
                  log_to_console: bool = True,
                  log_format: str = DEFAULT_FORMAT) -> None:
    """
    Configure the root logger for a command-line run.

    Existing root handlers are replaced. Python warnings (numpy overflow and
    invalid-value warnings among them) are routed into logging.

    Args:
        log_level: Level name; unknown names fall back to INFO
        log_file: Optional path of a rotating log file
        log_to_console: Attach a stderr handler
        log_format: Record format shared by all handlers
    """
    level = getattr(logging, str(log_level).upper(), logging.INFO)
    formatter = logging.Formatter(log_format, datefmt='%Y-%m-%d %H:%M:%S')

    handlers = []
    if log_file:
        directory = os.path.dirname(log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)
        handlers.append(logging.handlers.RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024,
                                                             backupCount=5))
    if log_to_console:
        handlers.append(logging.StreamHandler())

    root = logging.getLogger()
    for handler in root.handlers[:]:
        root.removeHandler(handler)
    for handler in handlers:
        handler.setFormatter(formatter)
        root.addHandler(handler)
    root.setLevel(level)

    logging.captureWarnings(True)
    logging.getLogger('py.warnings').setLevel(max(level, logging.WARNING))

    get_logger("logging").debug(f"Logging at {logging.getLevelName(level)}"
                                f"{' to ' + log_file if log_file else ''}")


def get_logger(name: str) -> logging.Logger:
    """Logger ``attractorkit.<name>``; names already in the namespace are kept."""
    if name != NAMESPACE and not name.startswith(NAMESPACE + "."):
        name = f"{NAMESPACE}.{name}"
    return logging.getLogger(name)


def log_execution_time(logger: logging.Logger, start_time: datetime,
                       operation: str, additional_info: Optional[Dict[str, Any]] = None) -> float:
    """
    Log how long a pipeline stage took.

    Args:
        logger: Logger of the caller
        start_time: ``datetime.now()`` taken when the stage started
        operation: Stage name
        additional_info: Optional key figures of the stage

    Returns:
        Elapsed seconds
    """
    elapsed = (datetime.now() - start_time).total_seconds()
    message = f"Stage {operation} finished in {elapsed:.3f} s"
    if additional_info:
        message += " | " + ", ".join(f"{k}={v}" for k, v in sorted(additional_info.items()))
    logger.info(message)
    return elapsed


def log_error_with_context(logger: logging.Logger, error: Exception,
                           context: Dict[str, Any], operation: str) -> None:
    """
    Log a failed stage with its failure code and context.

    The traceback is attached only when the logger is at DEBUG.

    Args:
        logger: Logger of the caller
        error: The exception raised by the stage
        context: Key figures describing the failing input
        operation: Stage name
    """
    code = getattr(error, "code", None)
    status = getattr(error, "exit_status", None)
    label = f"{type(error).__name__}" + (f" {code}" if code else "") + (f" (exit {status})" if status else "")
    details = ", ".join(f"{k}={v}" for k, v in sorted(context.items(), key=lambda item: str(item[0])))
    logger.error(f"Stage {operation} failed: {label}: {error}" + (f" | {details}" if details else ""),
                 exc_info=logger.isEnabledFor(logging.DEBUG))
