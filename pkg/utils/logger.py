"""
logger.py - Logging functionality for the space logistics optimizer.

Logging is configured once at application startup (main.py); modules retrieve
their loggers with get_logger(__name__) or logging.getLogger(__name__).
"""

import logging
import config

# Track if logging has been initialized
_logging_initialized = False


def setup_logging(level=None, log_file=None):
    """
    Set up global logging configuration for the application.

    Creates handlers for both file and console logging.
    Should be called only once at application startup.

    Args:
        level (str, optional): Log level name. Defaults to config.LOGLEVEL.
        log_file (str, optional): Log file path. Defaults to config.LOG_FILE.

    Returns:
        logging.Logger: Root logger instance
    """
    global _logging_initialized

    if _logging_initialized:
        if level:
            logging.getLogger().setLevel(level.upper())
        return logging.getLogger()

    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    root_logger = logging.getLogger()
    root_logger.setLevel((level or config.LOGLEVEL).upper())

    # Clear any existing handlers (to prevent duplicates if called multiple times)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    file_handler = logging.FileHandler(log_file or config.LOG_FILE)
    file_handler.setFormatter(logging.Formatter(log_format))
    root_logger.addHandler(file_handler)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(log_format))
    root_logger.addHandler(console_handler)

    _logging_initialized = True
    return root_logger


def get_logger(name=None):
    """
    Get a logger for the specified module.

    Always call with __name__ to ensure proper module identification in logs:
    `logger = get_logger(__name__)`

    Args:
        name (str, optional): Name for the logger, usually __name__.

    Returns:
        logging.Logger: Logger instance for the specified name
    """
    return logging.getLogger(name)
