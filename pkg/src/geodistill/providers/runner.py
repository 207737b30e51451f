"""Bounded-concurrency fan-out that never reorders results."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

from geodistill.providers.base import ChatRequest, ChatResponse


def complete_many(provider, requests: list[ChatRequest], max_concurrency: int = 4) -> list[ChatResponse]:
    """Run requests through provider.complete with at most max_concurrency in
    flight. Results come back in input order regardless of completion order;
    the first raised provider error propagates after all workers finish."""
    if not requests:
        return []
    if max_concurrency <= 1 or len(requests) == 1:
        return [provider.complete(r) for r in requests]
    with ThreadPoolExecutor(max_workers=max_concurrency) as pool:
        futures = [pool.submit(provider.complete, r) for r in requests]
        return [f.result() for f in futures]
