"""Core request/response types shared by every chat-completion provider."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from geodistill.errors import GeodistillError


class ProviderError(GeodistillError):
    """Base class for provider-side failures."""


class AuthError(ProviderError):
    """API key missing from the environment or rejected by the endpoint."""


class RateLimitExhausted(ProviderError):
    """Endpoint kept returning 429 past the retry budget."""


class TransportError(ProviderError):
    """Network failure or 5xx past the retry budget."""


class EmptyResponse(ProviderError):
    """Endpoint answered with no usable text past the retry budget."""


class FixtureMiss(ProviderError):
    """Mock provider has no canned response for this request (test-authoring error)."""


@dataclass(frozen=True)
class ChatRequest:
    """One chat-completion call: a system + user message pair.

    request_tag labels the pipeline stage issuing the call (e.g. "cot_answer");
    it routes mock fixtures and shows up in logs, but never affects caching.
    """

    provider_id: str
    model: str
    system: str
    user: str
    temperature: float = 0.0
    max_tokens: int = 2048
    request_tag: str = "adhoc"

    def __post_init__(self):
        if not self.user:
            raise ValueError("user message must be non-empty")
        if not self.request_tag:
            raise ValueError("request_tag must be non-empty")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    model: str
    latency_ms: int = 0
    cached: bool = False


@dataclass(frozen=True)
class ProviderConfig:
    """Transport settings for one configured endpoint."""

    base_url: str = ""
    api_key_env: str = ""
    max_concurrency: int = 4
    requests_per_minute: int = 60
    max_retries: int = 3
    backoff_base_ms: int = 250
    # mock-only: path to the fixture file; presence selects the mock provider
    fixtures: str | None = None

    def __post_init__(self):
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.requests_per_minute < 1:
            raise ValueError("requests_per_minute must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.backoff_base_ms <= 0:
            raise ValueError("backoff_base_ms must be positive")


def cache_key(req: ChatRequest) -> str:
    """Stable content hash over the fields that determine the completion.

    Only (model, system, user, temperature) participate: max_tokens and
    request_tag never change what a deterministic endpoint would return for
    caching purposes, and provider_id is implied by the cache directory.
    Canonical JSON keeps the key identical across processes and platforms.
    """
    payload = json.dumps(
        {
            "model": req.model,
            "system": req.system,
            "temperature": req.temperature,
            "user": req.user,
        },
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
