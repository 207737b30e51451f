"""LLM-as-a-judge prompt rendering and output parsing.

This layer works on raw strings; evaluation.py wraps it with question and
model identity to build persistable verdict records.
"""

from __future__ import annotations

import logging
import re

from geodistill.errors import GeodistillError
from geodistill.parsing import extract_json_value
from geodistill.prompts import fill, load_prompt, render
from geodistill.providers import ChatRequest, ChatResponse

log = logging.getLogger(__name__)

JUDGE_TEMPERATURE = 0.0
SCORE_RANGE = (0.0, 10.0)

# "Score A: [7], Score B: [8.5]" with flexible whitespace; brackets optional
# because models drop them about as often as they keep them.
_PAIRWISE = re.compile(
    r"Score\s+A\s*:\s*\[?\s*(?P<a>\d+(?:\.\d+)?)\s*\]?"
    r"[\s\S]*?"
    r"Score\s+B\s*:\s*\[?\s*(?P<b>\d+(?:\.\d+)?)\s*\]?",
    re.IGNORECASE,
)

_PAIRWISE_REMINDER = (
    "\n\nYour previous reply could not be parsed. Respond again and make sure "
    "the final line uses exactly this format: Score A: [X], Score B: [Y]"
)
_REFERENCE_REMINDER = (
    '\n\nYour previous reply could not be parsed. Respond with a single JSON '
    'object only: {"score": <number>, "reason": "<text>"}'
)


class VerdictParseError(GeodistillError):
    """Pairwise judge output unparseable even after one format-reminder retry."""


class ScoreParseError(GeodistillError):
    """Reference judge output unparseable even after one format-reminder retry."""


def _clamp(value: float, what: str) -> float:
    lo, hi = SCORE_RANGE
    if value < lo or value > hi:
        clamped = min(max(value, lo), hi)
        log.warning("%s %.3f outside [%g, %g]; clamped to %.3f", what, value, lo, hi, clamped)
        return clamped
    return value


def render_pairwise_prompt(question: str, answer_a: str, answer_b: str) -> str:
    return fill(
        load_prompt("pairwise_judge"),
        {
            "[Insert Question]": question,
            "[Insert Model A Answer]": answer_a,
            "[Insert Model B Answer]": answer_b,
        },
    )


def render_reference_prompt(question: str, reference: str, model_answer: str) -> str:
    return render("reference_judge", question=question, reference=reference, model_ans=model_answer)


def parse_pairwise(text: str) -> tuple[float, float]:
    m = _PAIRWISE.search(text)
    if m is None:
        raise VerdictParseError("no 'Score A: [X], Score B: [Y]' line found")
    a = _clamp(float(m.group("a")), "pairwise score A")
    b = _clamp(float(m.group("b")), "pairwise score B")
    return a, b


def parse_reference(text: str) -> tuple[float, str]:
    payload = extract_json_value(text, kind="object")
    if not isinstance(payload, dict):
        raise ScoreParseError("no JSON object found in judge output")
    if "score" not in payload:
        raise ScoreParseError("judge JSON has no 'score' field")
    raw = payload["score"]
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ScoreParseError(f"non-numeric score: {raw!r}")
    try:
        score = float(raw)
    except ValueError as exc:
        raise ScoreParseError(f"non-numeric score: {raw!r}") from exc
    reason = payload.get("reason", "")
    if not isinstance(reason, str):
        reason = str(reason)
    return _clamp(score, "reference score"), reason


def _judge_call(provider, model: str, user: str, tag: str) -> ChatResponse:
    req = ChatRequest(
        provider_id=provider.provider_id,
        model=model,
        system="",
        user=user,
        temperature=JUDGE_TEMPERATURE,
        request_tag=tag,
    )
    return provider.complete(req)


def call_pairwise(
    provider, model: str, question: str, answer_a: str, answer_b: str
) -> tuple[float, float, str]:
    """One judge call; on parse failure, one retry with an explicit format
    reminder appended, then VerdictParseError. Returns (score_a, score_b, raw)."""
    prompt = render_pairwise_prompt(question, answer_a, answer_b)
    resp = _judge_call(provider, model, prompt, "judge_pairwise")
    try:
        a, b = parse_pairwise(resp.text)
        return a, b, resp.text
    except VerdictParseError:
        log.warning("pairwise verdict unparseable; retrying with format reminder")
    resp = _judge_call(provider, model, prompt + _PAIRWISE_REMINDER, "judge_pairwise")
    a, b = parse_pairwise(resp.text)
    return a, b, resp.text


def call_reference(
    provider, model: str, question: str, reference: str, model_answer: str
) -> tuple[float, str, str]:
    """Returns (score, reason, raw) with the same one-retry policy."""
    prompt = render_reference_prompt(question, reference, model_answer)
    resp = _judge_call(provider, model, prompt, "judge_reference")
    try:
        score, reason = parse_reference(resp.text)
        return score, reason, resp.text
    except ScoreParseError:
        log.warning("reference score unparseable; retrying with format reminder")
    resp = _judge_call(provider, model, prompt + _REFERENCE_REMINDER, "judge_reference")
    score, reason = parse_reference(resp.text)
    return score, reason, resp.text
