"""Corpus ingestion: Markdown → sanitized, deduplicated text blocks.

A block is one blank-line-separated paragraph. Blocks are flagged (not
deleted) when they look like page furniture — bare page numbers, copyright
lines, ISBNs — so the sanitization stays auditable downstream.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from geodistill.errors import ConfigError
from geodistill.io import read_json

# Conservative defaults; the exact furniture vocabulary is corpus-dependent
# and overridable from project config.
DEFAULT_METADATA_PATTERNS = [
    r"(?i)\A(?:page\s+)?\d+\Z",
    r"(?i)©|\(c\)\s*\d{4}|\bcopyright\b|\ball rights reserved\b",
    r"(?i)\bisbn\b",
]

_SETEXT_H1 = re.compile(r"\A(?P<title>[^\n]+)\n=+\s*\Z")
_SETEXT_H2 = re.compile(r"\A(?P<title>[^\n]+)\n-{2,}\s*\Z")
_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    source_title: str
    markdown: str


@dataclass
class TextBlock:
    block_id: str
    doc_id: str
    ordinal: int
    text: str
    is_metadata: bool = False
    content_hash: str = ""

    def to_json(self) -> dict:
        return {
            "block_id": self.block_id,
            "doc_id": self.doc_id,
            "ordinal": self.ordinal,
            "text": self.text,
            "is_metadata": self.is_metadata,
            "content_hash": self.content_hash,
        }

    @classmethod
    def from_json(cls, d: dict) -> "TextBlock":
        return cls(
            block_id=d["block_id"],
            doc_id=d["doc_id"],
            ordinal=d["ordinal"],
            text=d["text"],
            is_metadata=d["is_metadata"],
            content_hash=d["content_hash"],
        )


@dataclass
class MetadataRuleSet:
    keyword_patterns: list[str] = field(default_factory=lambda: list(DEFAULT_METADATA_PATTERNS))
    enabled: bool = True

    def __post_init__(self):
        self._compiled = []
        for pat in self.keyword_patterns:
            try:
                self._compiled.append(re.compile(pat))
            except re.error as exc:
                raise ConfigError(f"metadata pattern {pat!r} does not compile: {exc}") from exc


def normalize_text(text: str) -> str:
    """Canonical form used for hashing: NFC, whitespace runs collapsed to one
    space, trimmed. Case is preserved — formation names are case-sensitive."""
    return _WS_RUN.sub(" ", unicodedata.normalize("NFC", text)).strip()


def content_hash(text: str) -> str:
    return hashlib.sha256(normalize_text(text).encode("utf-8")).hexdigest()


def _normalize_setext(paragraph: str) -> str:
    """Rewrite underlined headings as ATX so only one heading syntax survives."""
    m = _SETEXT_H1.match(paragraph)
    if m:
        return f"# {m.group('title').strip()}"
    m = _SETEXT_H2.match(paragraph)
    if m:
        return f"## {m.group('title').strip()}"
    return paragraph


def segment_blocks(doc: RawDocument) -> list[TextBlock]:
    """Split a document into its blank-line-separated paragraphs, in order.

    Runs of blank lines collapse; surrounding whitespace is trimmed; empty
    paragraphs are dropped. Ordinals are assigned 0..n-1 without gaps.
    """
    blocks: list[TextBlock] = []
    for paragraph in re.split(r"\n\s*\n", doc.markdown):
        text = _normalize_setext(paragraph.strip())
        if not text:
            continue
        ordinal = len(blocks)
        blocks.append(
            TextBlock(
                block_id=f"{doc.doc_id}:b{ordinal:04d}",
                doc_id=doc.doc_id,
                ordinal=ordinal,
                text=text,
                content_hash=content_hash(text),
            )
        )
    return blocks


def classify_metadata(block: TextBlock, rules: MetadataRuleSet) -> bool:
    """True iff any rule pattern matches the block text. Total: never raises
    on any Unicode input; disabled rule sets classify nothing."""
    if not rules.enabled:
        return False
    text = normalize_text(block.text)
    return any(pat.search(text) for pat in rules._compiled)


def dedup_blocks(blocks: list[TextBlock]) -> list[TextBlock]:
    """Keep the first occurrence (document order, then ordinal) of each
    normalized text corpus-wide; drop later exact duplicates. Idempotent."""
    seen: set[str] = set()
    survivors = []
    for block in blocks:
        if block.content_hash in seen:
            continue
        seen.add(block.content_hash)
        survivors.append(block)
    return survivors


def load_manifest(manifest_path: Path) -> list[RawDocument]:
    """Read the corpus manifest [{doc_id, source_title, path}] and the Markdown
    files it names (paths resolved relative to the manifest)."""
    entries = read_json(manifest_path)
    if not isinstance(entries, list):
        raise ConfigError(f"{manifest_path}: manifest must be a JSON list")
    docs = []
    seen_ids: set[str] = set()
    for entry in entries:
        doc_id = entry.get("doc_id")
        if not doc_id or doc_id in seen_ids:
            raise ConfigError(f"{manifest_path}: missing or duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        md_path = manifest_path.parent / entry["path"]
        docs.append(
            RawDocument(
                doc_id=doc_id,
                source_title=entry.get("source_title", doc_id),
                markdown=md_path.read_text(encoding="utf-8"),
            )
        )
    return docs


def ingest_corpus(docs: list[RawDocument], rules: MetadataRuleSet | None = None) -> list[TextBlock]:
    """Segment every document, flag metadata, and deduplicate globally."""
    rules = rules or MetadataRuleSet()
    blocks: list[TextBlock] = []
    for doc in docs:
        for block in segment_blocks(doc):
            block.is_metadata = classify_metadata(block, rules)
            blocks.append(block)
    return dedup_blocks(blocks)
