from geodistill.providers.base import (
    AuthError,
    ChatRequest,
    ChatResponse,
    EmptyResponse,
    FixtureMiss,
    ProviderConfig,
    ProviderError,
    RateLimitExhausted,
    TransportError,
    cache_key,
)
from geodistill.providers.cache import ResponseCache
from geodistill.providers.http import HttpProvider
from geodistill.providers.mock import FixtureSet, MockProvider, hash_for_fixture, mock_complete
from geodistill.providers.ratelimit import SlidingWindowLimiter
from geodistill.providers.runner import complete_many

__all__ = [
    "AuthError",
    "ChatRequest",
    "ChatResponse",
    "EmptyResponse",
    "FixtureMiss",
    "FixtureSet",
    "HttpProvider",
    "MockProvider",
    "ProviderConfig",
    "ProviderError",
    "RateLimitExhausted",
    "ResponseCache",
    "SlidingWindowLimiter",
    "TransportError",
    "cache_key",
    "complete_many",
    "hash_for_fixture",
    "mock_complete",
]
