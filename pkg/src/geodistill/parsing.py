"""Tolerant extraction of structured payloads from model chatter.

Models wrap JSON in code fences, prepend apologies, and append disclaimers;
these helpers scan for the first balanced JSON value instead of trusting the
whole message.
"""

from __future__ import annotations

import json
import re

_FENCE = re.compile(r"```(?:json|JSON)?\s*\n(.*?)```", re.DOTALL)


def strip_code_fences(text: str) -> str:
    m = _FENCE.search(text)
    return m.group(1) if m else text


def _scan_balanced(text: str, open_ch: str, close_ch: str) -> str | None:
    """Return the first balanced {...} or [...] span, string-aware."""
    start = text.find(open_ch)
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == open_ch:
                depth += 1
            elif ch == close_ch:
                depth -= 1
                if depth == 0:
                    return text[start : i + 1]
        start = text.find(open_ch, start + 1)
    return None


def extract_json_value(text: str, kind: str = "object"):
    """Parse the first balanced JSON object ("object") or array ("array") in
    text, looking inside code fences first. Returns None when nothing parses."""
    open_ch, close_ch = ("{", "}") if kind == "object" else ("[", "]")
    for candidate_text in (strip_code_fences(text), text):
        span = _scan_balanced(candidate_text, open_ch, close_ch)
        if span is None:
            continue
        try:
            return json.loads(span)
        except ValueError:
            continue
    return None


_NUMBER_PREFIX = re.compile(r"^\s*(?:\d+[.)]\s*|[-*•]\s+)")


def parse_listed_items(text: str) -> list[str]:
    """Pull items out of a numbered list, bulleted list, or one-per-line text.
    Also accepts a JSON array of strings."""
    value = extract_json_value(text, kind="array")
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return [v.strip() for v in value if v.strip()]
    items = []
    for line in text.splitlines():
        line = _NUMBER_PREFIX.sub("", line.strip())
        if line:
            items.append(line)
    return items
