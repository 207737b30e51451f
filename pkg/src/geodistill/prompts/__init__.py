"""Prompt templates shipped as versioned text assets.

Templates use literal `{slot}` markers filled by plain string replacement
(never str.format — several templates contain JSON braces). prompt_hash()
fingerprints the template text so each emitted record can pin the exact
prompt version that produced it.
"""

from __future__ import annotations

import hashlib
from importlib import resources


def load_prompt(name: str) -> str:
    return resources.files(__package__).joinpath(f"{name}.txt").read_text(encoding="utf-8")


def fill(template: str, replacements: dict[str, str]) -> str:
    """Literal marker replacement for templates whose markers are not brace
    slots (the pairwise judge uses bracketed insert markers)."""
    for marker, value in replacements.items():
        template = template.replace(marker, value)
    return template


def render(name: str, **slots: str) -> str:
    return fill(load_prompt(name), {"{" + key + "}": value for key, value in slots.items()})


def prompt_hash(*names: str) -> str:
    h = hashlib.sha256()
    for name in names:
        h.update(load_prompt(name).encode("utf-8"))
    return h.hexdigest()[:12]
