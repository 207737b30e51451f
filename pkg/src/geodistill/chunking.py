"""Heading-aware recursive chunking.

The heading hierarchy of the sanitized blocks becomes a tree; each chunk is
the largest subtree (or greedy run of paragraphs) that fits the size policy,
prefixed with its heading path so the text carries its own context into
generation prompts. The prefix is delimiter-separated ("A > B > C\\n\\n") and
therefore strippable, which is what the coverage tests rely on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from geodistill.ingest import TextBlock

_ATX = re.compile(r"\A(?P<hashes>#{1,6})\s+(?P<title>.+?)\s*#*\s*\Z")

PATH_SEPARATOR = " > "
PREFIX_DELIMITER = "\n\n"
BODY_JOIN = "\n\n"


@dataclass
class HeadingNode:
    level: int
    title: str
    span: tuple[int, int]  # [start_block, end_block) ordinals into the block list
    children: list["HeadingNode"] = field(default_factory=list)
    # indices of this node's own body blocks (between its heading and first child)
    body: list[int] = field(default_factory=list)


@dataclass
class Chunk:
    chunk_id: str
    doc_id: str
    heading_path: list[str]
    text: str
    char_count: int
    sequence: int

    def to_json(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "heading_path": self.heading_path,
            "text": self.text,
            "char_count": self.char_count,
            "sequence": self.sequence,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Chunk":
        return cls(
            chunk_id=d["chunk_id"],
            doc_id=d["doc_id"],
            heading_path=list(d["heading_path"]),
            text=d["text"],
            char_count=d["char_count"],
            sequence=d["sequence"],
        )

    def body_text(self) -> str:
        """Chunk text with the heading-path prefix stripped back off."""
        return strip_heading_prefix(self.text, self.heading_path)


@dataclass(frozen=True)
class ChunkPolicy:
    max_chars: int = 3000
    min_chars: int = 200

    def __post_init__(self):
        if self.min_chars >= self.max_chars:
            raise ValueError("min_chars must be < max_chars")
        if self.min_chars <= 0:
            raise ValueError("sizes must be positive")


def heading_of(text: str) -> tuple[int, str] | None:
    """(level, title) when the block is a single-line ATX heading, else None."""
    if "\n" in text:
        return None
    m = _ATX.match(text)
    if not m:
        return None
    return len(m.group("hashes")), m.group("title")


def render_prefix(heading_path: list[str]) -> str:
    if not heading_path:
        return ""
    return PATH_SEPARATOR.join(heading_path) + PREFIX_DELIMITER


def strip_heading_prefix(text: str, heading_path: list[str]) -> str:
    prefix = render_prefix(heading_path)
    if prefix and text.startswith(prefix):
        return text[len(prefix):]
    return text


def parse_heading_tree(blocks: list[TextBlock]) -> HeadingNode:
    """Build the document outline from single-line ATX headings.

    A heading at level L closes every open heading at level >= L; skipped
    levels nest under the nearest shallower open heading. The returned root is
    synthetic (level 0) and spans all blocks.
    """
    root = HeadingNode(level=0, title="", span=(0, len(blocks)))
    stack = [root]
    for i, block in enumerate(blocks):
        head = heading_of(block.text)
        if head is None:
            stack[-1].body.append(i)
            continue
        level, title = head
        while stack[-1].level >= level:
            closed = stack.pop()
            closed.span = (closed.span[0], i)
        node = HeadingNode(level=level, title=title, span=(i, len(blocks)))
        stack[-1].children.append(node)
        stack.append(node)
    while len(stack) > 1:
        closed = stack.pop()
        closed.span = (closed.span[0], len(blocks))
    return root


def _subtree_body(node: HeadingNode, blocks: list[TextBlock]) -> list[str]:
    texts = [blocks[i].text for i in node.body]
    for child in node.children:
        texts.extend(_subtree_body(child, blocks))
    return texts


def _greedy_paragraph_runs(paragraphs: list[str], max_chars: int) -> list[list[str]]:
    """Pack paragraphs left-to-right into runs of joined length <= max_chars.
    A single paragraph longer than max_chars is indivisible and forms its own
    (oversized) run."""
    runs: list[list[str]] = []
    current: list[str] = []
    size = 0
    for para in paragraphs:
        added = len(para) if not current else size + len(BODY_JOIN) + len(para)
        if current and added > max_chars:
            runs.append(current)
            current, size = [], 0
            added = len(para)
        current.append(para)
        size = added
    if current:
        runs.append(current)
    return runs


def recursive_chunk(tree: HeadingNode, blocks: list[TextBlock], policy: ChunkPolicy,
                    doc_id: str = "") -> list[Chunk]:
    """Chunk a parsed document.

    Nodes whose prefixed subtree text fits max_chars become one chunk;
    otherwise the node's own body is chunked separately (splitting greedily at
    paragraph boundaries) and children are recursed in document order.
    Trailing pieces under min_chars merge back into the previous chunk with
    the same heading path when the merge still fits.
    """
    doc_id = doc_id or (blocks[0].doc_id if blocks else "doc")
    pieces: list[tuple[list[str], str]] = []  # (heading_path, body text)

    def emit_body(paragraphs: list[str], path: list[str]) -> None:
        # the size budget covers the rendered prefix too: consumers see prefix+body
        budget = max(1, policy.max_chars - len(render_prefix(path)))
        for run in _greedy_paragraph_runs(paragraphs, budget):
            pieces.append((list(path), BODY_JOIN.join(run)))

    def walk(node: HeadingNode, path: list[str]) -> None:
        here = path + [node.title] if node.level > 0 else path
        subtree = _subtree_body(node, blocks)
        if not subtree:
            return
        full = BODY_JOIN.join(subtree)
        # A bodyless node never swallows its children: its chunk's first block
        # would then sit under a deeper heading than the chunk's path claims.
        if len(render_prefix(here)) + len(full) <= policy.max_chars and (
            node.body or not node.children
        ):
            pieces.append((list(here), full))
            return
        own = [blocks[i].text for i in node.body]
        if own:
            emit_body(own, here)
        for child in node.children:
            walk(child, here)

    walk(tree, [])

    # fold undersized trailing pieces into their predecessor under the same path
    merged: list[tuple[list[str], str]] = []
    for path, body in pieces:
        if (
            merged
            and merged[-1][0] == path
            and len(body) < policy.min_chars
            and len(render_prefix(path)) + len(merged[-1][1]) + len(BODY_JOIN) + len(body)
            <= policy.max_chars
        ):
            merged[-1] = (path, merged[-1][1] + BODY_JOIN + body)
        else:
            merged.append((path, body))

    chunks = []
    for seq, (path, body) in enumerate(merged):
        text = render_prefix(path) + body
        chunks.append(
            Chunk(
                chunk_id=f"{doc_id}:c{seq:04d}",
                doc_id=doc_id,
                heading_path=path,
                text=text,
                char_count=len(text),
                sequence=seq,
            )
        )
    return chunks


def chunk_blocks(blocks: list[TextBlock], policy: ChunkPolicy) -> list[Chunk]:
    """Chunk a whole corpus: metadata blocks are excluded, each document is
    chunked independently, and chunk ids stay unique corpus-wide."""
    by_doc: dict[str, list[TextBlock]] = {}
    for block in blocks:
        if not block.is_metadata:
            by_doc.setdefault(block.doc_id, []).append(block)
    chunks: list[Chunk] = []
    for doc_id, doc_blocks in by_doc.items():
        tree = parse_heading_tree(doc_blocks)
        chunks.extend(recursive_chunk(tree, doc_blocks, policy, doc_id=doc_id))
    return chunks
