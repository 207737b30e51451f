"""Content-addressed on-disk response cache.

Layout: <cache_dir>/<first-2-hex>/<key>.json holding {request, response,
timestamp}. Writes go through a temp file + rename so concurrent writers can
never leave a torn entry; last writer wins, which is harmless because the key
is a content hash of the request.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict
from pathlib import Path

from geodistill.io import atomic_write_text
from geodistill.providers.base import ChatRequest, cache_key


class ResponseCache:
    def __init__(self, cache_dir: Path | str):
        self.cache_dir = Path(cache_dir)

    def _path(self, key: str) -> Path:
        return self.cache_dir / key[:2] / f"{key}.json"

    def get(self, req: ChatRequest) -> str | None:
        """Return the stored response text, or None on a miss or unreadable entry."""
        path = self._path(cache_key(req))
        if not path.exists():
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                entry = json.load(fh)
            return entry["response"]["text"]
        except (OSError, ValueError, KeyError):
            return None

    def put(self, req: ChatRequest, text: str) -> None:
        key = cache_key(req)
        entry = {
            "request": asdict(req),
            "response": {"text": text, "model": req.model},
            "timestamp": time.time(),
        }
        atomic_write_text(self._path(key), json.dumps(entry, ensure_ascii=False))
