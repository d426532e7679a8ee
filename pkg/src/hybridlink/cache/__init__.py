"""Cache module for storing electrostatics solves."""

from hybridlink.cache.manager import CacheManager, get_cached_field, save_field

__all__ = ["CacheManager", "get_cached_field", "save_field"]
