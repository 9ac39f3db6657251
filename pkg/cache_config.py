"""
cache_config.py - Solution cache configuration

Configures one global diskcache.FanoutCache for solved sweep points. Keys are
SHA-256 digests of everything that determines a solve, so a changed fit table,
campaign setting or solver option never hits a stale entry.
"""

import hashlib
import json
import logging
from pathlib import Path

from diskcache import FanoutCache

import config

logger = logging.getLogger(__name__)

cache_dir = config.CACHE_DIR
Path(cache_dir).mkdir(parents=True, exist_ok=True)

# Shared by all sweep workers
cache = FanoutCache(cache_dir, shards=8)

SOLUTION_TAG = 'solution'


def solution_cache_key(*parts) -> str:
    """
    Digest of JSON-serializable key parts.

    Args:
        *parts: Config fingerprint, sweep point, solver options, table checksums, ...

    Returns:
        str: Hex SHA-256 of the canonical JSON form
    """
    payload = json.dumps(parts, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def get_cached_solution(key: str):
    """Cached value for key, or None."""
    try:
        value = cache.get(key)
    except Exception as e:
        logger.warning(f"Cache read failed for {key[:12]}: {e}")
        return None
    if value is not None:
        logger.debug(f"Cache hit {key[:12]}")
    return value


def store_solution(key: str, value, expire: float = None) -> bool:
    try:
        return bool(cache.set(key, value, expire=expire, tag=SOLUTION_TAG))
    except Exception as e:
        logger.warning(f"Cache write failed for {key[:12]}: {e}")
        return False


def clear_all_cache():
    """
    Clear the entire cache.

    Returns:
        int: Number of items deleted
    """
    try:
        items_count = len(cache)
        cache.clear()
        logger.info(f"Cleared all {items_count} items from {cache_dir}")
        return items_count
    except Exception as e:
        logger.error(f"Error clearing cache: {e}")
        return 0


def get_cache_info():
    """
    Get information about the current cache.

    Returns:
        dict: Cache statistics
    """
    try:
        hits, misses = cache.stats()
        return {
            'count': len(cache),
            'hits': hits,
            'misses': misses,
            'size_kb': cache.volume() / 1024,
            'directory': cache_dir,
            'status': 'active'
        }
    except Exception as e:
        logger.error(f"Error getting cache info: {e}")
        return {
            'error': str(e),
            'directory': cache_dir,
            'status': 'error'
        }


def cached_solution(key: str, compute, use_cache: bool = True, store_if=None):
    """
    Return the cached value for key, or compute, store and return it.

    Args:
        key: Content hash from solution_cache_key()
        compute: Zero-argument callable producing a picklable value
        use_cache: False bypasses both lookup and store
        store_if: Optional predicate on the computed value; values it rejects are not stored

    Returns:
        tuple: (value, hit) where hit tells whether the cache answered
    """
    if use_cache:
        value = get_cached_solution(key)
        if value is not None:
            return value, True
    value = compute()
    if use_cache and value is not None and (store_if is None or store_if(value)):
        store_solution(key, value)
    return value, False
