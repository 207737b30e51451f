"""Domain tree construction, chunk tagging, and question budgeting.

The model proposes the concept hierarchy and the tags; everything it returns
is validated against hard invariants, with deterministic fallbacks so one bad
response can never stall the pipeline.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from geodistill import prompts
from geodistill.chunking import Chunk
from geodistill.errors import GeodistillError
from geodistill.parsing import extract_json_value
from geodistill.providers.base import ChatRequest

logger = logging.getLogger(__name__)

TREE_REPAIR_RETRIES = 2
MAX_TAGS_PER_CHUNK = 3


class EmptyOutline(GeodistillError):
    pass


class MalformedTree(GeodistillError):
    """Model never produced a parseable concept tree."""


@dataclass
class DomainNode:
    tag_id: str
    label: str
    parent: str | None


@dataclass
class DomainTree:
    nodes: list[DomainNode]

    def __post_init__(self):
        ids = [n.tag_id for n in self.nodes]
        if len(ids) != len(set(ids)):
            raise ValueError("tag_ids must be unique")
        roots = [n for n in self.nodes if n.parent is None]
        if len(roots) != 1:
            raise ValueError(f"tree must have exactly one root, found {len(roots)}")
        known = set(ids)
        for n in self.nodes:
            if not n.label:
                raise ValueError("labels must be non-empty")
            if n.parent is not None and n.parent not in known:
                raise ValueError(f"unknown parent {n.parent!r}")

    @property
    def root(self) -> DomainNode:
        return next(n for n in self.nodes if n.parent is None)

    def node(self, tag_id: str) -> DomainNode:
        return next(n for n in self.nodes if n.tag_id == tag_id)

    def depth(self, tag_id: str) -> int:
        by_id = {n.tag_id: n for n in self.nodes}
        d, cur = 0, by_id[tag_id]
        while cur.parent is not None:
            cur = by_id[cur.parent]
            d += 1
        return d

    def labels(self) -> list[str]:
        return [n.label for n in self.nodes]

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"tag_id": n.tag_id, "label": n.label, "parent": n.parent} for n in self.nodes
            ]
        }

    @classmethod
    def from_json(cls, d: dict) -> "DomainTree":
        return cls(nodes=[DomainNode(**n) for n in d["nodes"]])


@dataclass
class ChunkTagging:
    chunk_id: str
    tags: list[str]
    confidence: list[float]

    def to_json(self) -> dict:
        return {"chunk_id": self.chunk_id, "tags": self.tags, "confidence": self.confidence}

    @classmethod
    def from_json(cls, d: dict) -> "ChunkTagging":
        return cls(chunk_id=d["chunk_id"], tags=list(d["tags"]), confidence=list(d["confidence"]))


@dataclass
class QuestionBudget:
    chunk_id: str
    n_questions: int

    def to_json(self) -> dict:
        return {"chunk_id": self.chunk_id, "n_questions": self.n_questions}


@dataclass(frozen=True)
class BudgetConfig:
    density_divisor: int = 800
    max_per_chunk: int = 5
    min_chars: int = 200  # below this, untagged chunks get no questions

    def __post_init__(self):
        if self.density_divisor < 1 or self.max_per_chunk < 1:
            raise ValueError("divisor and cap must be positive")


def _tree_from_payload(payload) -> DomainTree:
    if not isinstance(payload, dict):
        raise ValueError("tree payload must be an object")
    root = payload.get("root", payload)
    nodes: list[DomainNode] = []

    def add(node, parent_id: str | None):
        if not isinstance(node, dict) or not str(node.get("label", "")).strip():
            raise ValueError("every tree node needs a non-empty label")
        tag_id = f"t{len(nodes):03d}"
        nodes.append(DomainNode(tag_id=tag_id, label=str(node["label"]).strip(), parent=parent_id))
        children = node.get("children") or []
        if not isinstance(children, list):
            raise ValueError("children must be a list")
        for child in children:
            add(child, tag_id)

    add(root, None)
    return DomainTree(nodes=nodes)


def build_domain_tree(outline: list[list[str]], provider, model: str) -> DomainTree:
    """Ask the model for a concept hierarchy covering the corpus outline.

    Malformed responses are retried up to TREE_REPAIR_RETRIES times with a
    repair instruction appended; a tree that fails validation is never
    returned partially.
    """
    if not outline:
        raise EmptyOutline("cannot build a domain tree from an empty outline")
    outline_text = "\n".join(" > ".join(path) if path else "(top level)" for path in outline)
    user = prompts.render("domain_tree", outline=outline_text)
    last_error = "no response"
    for attempt in range(TREE_REPAIR_RETRIES + 1):
        req = ChatRequest(
            provider_id=getattr(provider, "provider_id", "?"),
            model=model,
            system="",
            user=user,
            temperature=0.0,
            request_tag="domain_tree",
        )
        text = provider.complete(req).text
        payload = extract_json_value(text, kind="object")
        if payload is not None:
            try:
                return _tree_from_payload(payload)
            except ValueError as exc:
                last_error = str(exc)
        else:
            last_error = "response contained no JSON object"
        user = user + f"\n\nYour previous reply was invalid ({last_error}). Return ONLY the JSON object."
    raise MalformedTree(f"no valid tree after {TREE_REPAIR_RETRIES + 1} attempts: {last_error}")


def _heading_fallback(chunk: Chunk, tree: DomainTree) -> DomainNode:
    """Deepest tree node whose label matches a heading-path component
    (case-insensitive), else the root."""
    path_lower = {t.strip().lower() for t in chunk.heading_path}
    best: DomainNode | None = None
    best_depth = -1
    for node in tree.nodes:
        if node.label.strip().lower() in path_lower:
            d = tree.depth(node.tag_id)
            if d > best_depth:
                best, best_depth = node, d
    return best or tree.root


def bind_tags(chunk: Chunk, tree: DomainTree, provider, model: str) -> ChunkTagging:
    """Bind 1..3 tree tags to a chunk via the model, with deterministic
    fallbacks when the response references nothing in the tree."""
    labels = tree.labels()
    user = prompts.render("tag_binding", labels="\n".join(f"- {l}" for l in labels), chunk=chunk.text)
    req = ChatRequest(
        provider_id=getattr(provider, "provider_id", "?"),
        model=model,
        system="",
        user=user,
        temperature=0.0,
        request_tag="tag_binding",
    )
    text = provider.complete(req).text

    proposed = extract_json_value(text, kind="array")
    if not isinstance(proposed, list):
        proposed = [line.strip("-* \t") for line in text.splitlines() if line.strip()]
    by_label = {}
    for node in tree.nodes:  # first (shallowest-first insertion) wins on label collisions
        by_label.setdefault(node.label.strip().lower(), node)

    chosen: list[DomainNode] = []
    for item in proposed:
        node = by_label.get(str(item).strip().strip('"').lower())
        if node and node not in chosen:
            chosen.append(node)
        if len(chosen) == MAX_TAGS_PER_CHUNK:
            break

    if chosen:
        confidence = [1.0] * len(chosen)
    else:
        fallback = _heading_fallback(chunk, tree)
        logger.debug("chunk %s: no usable tags in response, fell back to %s", chunk.chunk_id, fallback.label)
        chosen = [fallback]
        confidence = [0.5 if fallback.parent is not None else 0.25]
    return ChunkTagging(chunk_id=chunk.chunk_id, tags=[n.tag_id for n in chosen], confidence=confidence)


def allocate_questions(chunk: Chunk, tagging: ChunkTagging, cfg: BudgetConfig, tree: DomainTree) -> QuestionBudget:
    """Question count from character density: ceil(chars / divisor), clamped
    to [1, max_per_chunk]. Degenerate chunks (nothing more specific than the
    root tag AND too short) get zero."""
    root_only = all(tag == tree.root.tag_id for tag in tagging.tags)
    if root_only and chunk.char_count < cfg.min_chars:
        return QuestionBudget(chunk_id=chunk.chunk_id, n_questions=0)
    n = math.ceil(chunk.char_count / cfg.density_divisor)
    n = max(1, min(cfg.max_per_chunk, n))
    return QuestionBudget(chunk_id=chunk.chunk_id, n_questions=n)
