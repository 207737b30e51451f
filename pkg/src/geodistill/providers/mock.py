"""Deterministic mock provider: canned responses keyed by request content.

Fixture files are plain JSON maps. Keys take two forms:

  "<tag>:<content-hash>"  exact match for one request (hash = cache_key)
  "<tag>:*"               fallback for every request carrying that tag

Values are either a string (always returned) or a list of strings; a list is
indexed by the request's content hash, so distinct requests under one tag get
distinct-but-reproducible responses. Everything is a pure function of
(request, fixtures): two runs over the same inputs are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from geodistill.providers.base import ChatRequest, ChatResponse, FixtureMiss, cache_key


class FixtureSet:
    def __init__(self, entries: dict[str, str | list[str]]):
        self.entries = dict(entries)

    @classmethod
    def load(cls, path: Path | str) -> "FixtureSet":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def lookup(self, tag: str, content_hash: str) -> str:
        exact = self.entries.get(f"{tag}:{content_hash}")
        if exact is None:
            exact = self.entries.get(f"{tag}:*")
        if exact is None:
            raise FixtureMiss(f"no fixture for tag={tag!r} hash={content_hash[:12]}…")
        if isinstance(exact, list):
            if not exact:
                raise FixtureMiss(f"empty fixture list for tag={tag!r}")
            return exact[int(content_hash[:8], 16) % len(exact)]
        return exact


class MockProvider:
    """Network-free provider for tests and dry runs."""

    def __init__(self, fixtures: FixtureSet, provider_id: str = "mock"):
        self.provider_id = provider_id
        self.fixtures = fixtures
        self.calls = 0  # issued (non-cached) request count, for resumability tests

    def complete(self, req: ChatRequest) -> ChatResponse:
        self.calls += 1
        text = self.fixtures.lookup(req.request_tag, cache_key(req))
        return ChatResponse(text=text, model=req.model, latency_ms=0, cached=False)


def mock_complete(req: ChatRequest, fixtures: FixtureSet) -> ChatResponse:
    return MockProvider(fixtures).complete(req)


def hash_for_fixture(req: ChatRequest) -> str:
    """Content hash a fixture author should key an exact entry under."""
    return cache_key(req)


__all__ = ["FixtureSet", "MockProvider", "mock_complete", "hash_for_fixture"]
