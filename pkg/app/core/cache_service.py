"""
In-memory render cache keyed by content hash
"""
import hashlib
import logging
from typing import Any, Optional

from cachetools import TTLCache

from app.config import settings

logger = logging.getLogger(__name__)


class CacheManager:
    """
    TTL cache for compiled outputs. Keys are namespaced; values are whatever
    the caller stores (render results are lists of pydantic models).
    """

    def __init__(self, maxsize: Optional[int] = None, ttl: Optional[int] = None):
        self._memory_cache = TTLCache(maxsize=maxsize or settings.cache_size, ttl=ttl or settings.cache_ttl)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def content_key(*parts: Any) -> str:
        """Stable hash over the request content"""
        digest = hashlib.sha256()
        for part in parts:
            data = part if isinstance(part, bytes) else str(part).encode("utf-8")
            digest.update(len(data).to_bytes(8, "big"))
            digest.update(data)
        return digest.hexdigest()

    def _generate_key(self, key: str, namespace: str = "default") -> str:
        return f"{namespace}:{key}"

    def get(self, key: str, namespace: str = "default") -> Optional[Any]:
        if not settings.enable_caching:
            return None
        cache_key = self._generate_key(key, namespace)
        if cache_key in self._memory_cache:
            self.hits += 1
            logger.debug(f"Memory cache hit: {cache_key}")
            return self._memory_cache[cache_key]
        self.misses += 1
        logger.debug(f"Cache miss: {cache_key}")
        return None

    def set(self, key: str, value: Any, namespace: str = "default") -> bool:
        if not settings.enable_caching:
            return False
        cache_key = self._generate_key(key, namespace)
        self._memory_cache[cache_key] = value
        logger.debug(f"Cache set: {cache_key}")
        return True

    def delete(self, key: str, namespace: str = "default") -> bool:
        return self._memory_cache.pop(self._generate_key(key, namespace), None) is not None

    def clear_namespace(self, namespace: str) -> int:
        keys_to_delete = [k for k in list(self._memory_cache.keys()) if k.startswith(f"{namespace}:")]
        for key in keys_to_delete:
            self._memory_cache.pop(key, None)
        logger.info(f"Cleared cache namespace: {namespace} ({len(keys_to_delete)} entries)")
        return len(keys_to_delete)

    def get_stats(self) -> dict:
        return {
            "memory_cache_size": len(self._memory_cache),
            "memory_cache_maxsize": self._memory_cache.maxsize,
            "hits": self.hits,
            "misses": self.misses,
            "enabled": settings.enable_caching,
        }


# Singleton instance
cache_manager = CacheManager()
