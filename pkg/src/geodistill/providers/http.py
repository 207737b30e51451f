"""HTTP chat-completion provider with retries, rate limiting, and caching.

Speaks the common JSON chat protocol: POST {model, messages, temperature,
max_tokens} to the configured endpoint, read choices[0].message.content.
"""

from __future__ import annotations

import logging
import os
import time
from pathlib import Path
from typing import Callable

import httpx

from geodistill.providers.base import (
    AuthError,
    ChatRequest,
    ChatResponse,
    EmptyResponse,
    ProviderConfig,
    RateLimitExhausted,
    TransportError,
)
from geodistill.providers.cache import ResponseCache
from geodistill.providers.ratelimit import SlidingWindowLimiter

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


class HttpProvider:
    """One configured endpoint. Thread-safe; share a single instance per provider_id."""

    def __init__(
        self,
        provider_id: str,
        cfg: ProviderConfig,
        cache_dir: Path | str | None = None,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.provider_id = provider_id
        self.cfg = cfg
        self.cache = ResponseCache(cache_dir) if cache_dir else None
        self.limiter = SlidingWindowLimiter(cfg.requests_per_minute, sleep=sleep)
        self._sleep = sleep
        self._client = httpx.Client(transport=transport, timeout=120.0)

    def _api_key(self) -> str:
        key = os.environ.get(self.cfg.api_key_env, "") if self.cfg.api_key_env else ""
        if not key:
            raise AuthError(
                f"provider {self.provider_id}: no API key in ${self.cfg.api_key_env}"
            )
        return key

    def complete(self, req: ChatRequest) -> ChatResponse:
        if self.cache is not None:
            hit = self.cache.get(req)
            if hit is not None:
                return ChatResponse(text=hit, model=req.model, latency_ms=0, cached=True)

        key = self._api_key()
        body = {
            "model": req.model,
            "messages": [
                {"role": "system", "content": req.system},
                {"role": "user", "content": req.user},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        if not req.system:
            body["messages"] = body["messages"][1:]

        last_failure: Exception | None = None
        rate_limited = False
        started = time.monotonic()
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                backoff = self.cfg.backoff_base_ms / 1000.0 * (2 ** (attempt - 1))
                logger.debug(
                    "retrying %s (%s/%s) after %.2fs",
                    req.request_tag,
                    attempt,
                    self.cfg.max_retries,
                    backoff,
                )
                self._sleep(backoff)
            self.limiter.acquire()
            try:
                resp = self._client.post(
                    self.cfg.base_url,
                    json=body,
                    headers={"Authorization": f"Bearer {key}"},
                )
            except httpx.HTTPError as exc:
                last_failure = TransportError(f"transport failure: {exc}")
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"provider {self.provider_id}: key rejected ({resp.status_code})")
            if resp.status_code in RETRYABLE_STATUS:
                rate_limited = resp.status_code == 429
                last_failure = TransportError(f"HTTP {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            text = self._extract_text(resp)
            if not text:
                last_failure = EmptyResponse("endpoint returned empty text")
                continue
            latency_ms = int((time.monotonic() - started) * 1000)
            if self.cache is not None:
                self.cache.put(req, text)
            return ChatResponse(text=text, model=req.model, latency_ms=latency_ms, cached=False)

        if isinstance(last_failure, EmptyResponse):
            raise last_failure
        if rate_limited:
            raise RateLimitExhausted(
                f"still rate-limited after {self.cfg.max_retries + 1} attempts"
            )
        raise TransportError(f"gave up after {self.cfg.max_retries + 1} attempts: {last_failure}")

    @staticmethod
    def _extract_text(resp: httpx.Response) -> str:
        try:
            payload = resp.json()
            return payload["choices"][0]["message"]["content"] or ""
        except (ValueError, LookupError, TypeError):
            return ""
