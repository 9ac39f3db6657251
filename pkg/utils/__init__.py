"""
utils package - Common utilities for the space logistics optimizer.

Logging setup, directory creation and the concurrency policy registry.
"""

from .logger import setup_logging, get_logger
from .filesystem import ensure_directories_exist
from .policy_registry import (
    register_policy,
    get_policy,
    list_policies,
    auto_register_policies,
)
