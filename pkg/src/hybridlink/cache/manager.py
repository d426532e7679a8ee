"""
Cache manager for electrostatics solves.

Uses file-based caching with the SHA256 hash of the canonical solve request as key.
"""

import hashlib
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

from hybridlink.config import settings

logger = logging.getLogger(__name__)


class CacheManager:
    """Manages caching of field solves."""

    def __init__(self, cache_dir: Optional[Path] = None, enabled: Optional[bool] = None):
        """
        Initialize cache manager.

        Args:
            cache_dir: Directory for cache storage. Defaults to settings.cache_dir.
            enabled: Override settings.cache_enabled.
        """
        self.cache_dir = cache_dir or settings.cache_dir
        self.enabled = settings.cache_enabled if enabled is None else enabled

    def key_for(self, request: dict[str, Any]) -> str:
        """Generate SHA256 hash of the canonical JSON form of a request."""
        canonical = json.dumps(request, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def _get_cache_path(self, key: str) -> Path:
        """Get cache file path for a given hash."""
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        return self.cache_dir / f"{key}.json"

    def get(self, request: dict[str, Any]) -> Optional[dict[str, Any]]:
        """
        Get the cached result of a request.

        Args:
            request: JSON-serializable description of the solve.

        Returns:
            Cached result dict if found, None otherwise.
        """
        if not self.enabled:
            return None

        cache_path = self._get_cache_path(self.key_for(request))
        if cache_path.exists():
            try:
                entry = json.loads(cache_path.read_text(encoding="utf-8"))
                return entry["result"]
            except (json.JSONDecodeError, KeyError, OSError):
                # Invalid cache, remove it
                cache_path.unlink(missing_ok=True)
                return None
        return None

    def save(self, request: dict[str, Any], result: dict[str, Any]) -> None:
        """
        Save a result to cache.

        Args:
            request: JSON-serializable description of the solve.
            result: Result dict to cache.
        """
        if not self.enabled:
            return

        key = self.key_for(request)
        entry = {
            "request": request,
            "result": result,
            "_cache_metadata": {
                "cached_at": datetime.now().isoformat(),
                "key": key,
            },
        }
        self._get_cache_path(key).write_text(
            json.dumps(entry, ensure_ascii=False, indent=2, default=str),
            encoding="utf-8",
        )
        logger.debug(f"Cached solve {key[:12]}")

    def clear(self) -> int:
        """
        Clear all cached solves.

        Returns:
            Number of cache files removed.
        """
        count = 0
        if self.cache_dir.exists():
            for cache_file in self.cache_dir.glob("*.json"):
                cache_file.unlink()
                count += 1
        return count


_cache_manager: Optional[CacheManager] = None


def _get_cache_manager() -> CacheManager:
    """Get or create global cache manager instance."""
    global _cache_manager
    if _cache_manager is None:
        _cache_manager = CacheManager()
    return _cache_manager


def get_cached_field(request: dict[str, Any]) -> Optional[dict[str, Any]]:
    """Get cached field solve for a request."""
    return _get_cache_manager().get(request)


def save_field(request: dict[str, Any], result: dict[str, Any]) -> None:
    """Save field solve to cache."""
    _get_cache_manager().save(request, result)
