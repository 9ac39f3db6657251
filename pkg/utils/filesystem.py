"""
filesystem.py - File system helpers for the space logistics optimizer.
"""

from pathlib import Path
import logging

import config

logger = logging.getLogger(__name__)


def ensure_directories_exist(*extra_dirs):
    """
    Ensure all required directories for the application exist.

    Creates the cache and output directories plus any extra directories given.

    Args:
        *extra_dirs: Additional directories to create (e.g. a --out target)
    """
    for directory in (config.CACHE_DIR, config.OUTPUT_DIR) + tuple(extra_dirs):
        if directory:
            Path(directory).mkdir(parents=True, exist_ok=True)
    logger.debug("Ensured required directories exist")
