"""Heading-aware chunking: outline parsing, size policy, coverage guarantees.

Hand-built oracle cases pin the packing decisions; the random-document
property asserts the load-bearing invariant that stripping prefixes and
concatenating chunks reproduces the body text exactly.
"""

from __future__ import annotations

import random

import pytest
from conftest import make_random_markdown

from geodistill.chunking import (
    ChunkPolicy,
    chunk_blocks,
    heading_of,
    parse_heading_tree,
    render_prefix,
    strip_heading_prefix,
)
from geodistill.ingest import RawDocument, TextBlock, content_hash, ingest_corpus


def blocks_from(*texts: str, doc_id: str = "d") -> list[TextBlock]:
    return [
        TextBlock(
            block_id=f"{doc_id}:b{i:04d}",
            doc_id=doc_id,
            ordinal=i,
            text=t,
            content_hash=content_hash(t),
        )
        for i, t in enumerate(texts)
    ]


class TestHeadingOf:
    def test_levels(self):
        assert heading_of("# A") == (1, "A")
        assert heading_of("###### deep") == (6, "deep")

    def test_trailing_hashes_and_spaces_stripped(self):
        assert heading_of("##   Spaced Title   ##") == (2, "Spaced Title")

    def test_non_headings(self):
        assert heading_of("#nospace") is None
        assert heading_of("####### seven is too deep") is None
        assert heading_of("# two\nlines") is None
        assert heading_of("plain text") is None


class TestPrefix:
    def test_round_trip(self):
        path = ["Geology", "Faulting", "Mohr Circles"]
        prefix = render_prefix(path)
        assert prefix == "Geology > Faulting > Mohr Circles\n\n"
        assert strip_heading_prefix(prefix + "body", path) == "body"

    def test_empty_path(self):
        assert render_prefix([]) == ""
        assert strip_heading_prefix("body", []) == "body"


class TestParseHeadingTree:
    def test_spans_and_bodies(self):
        blocks = blocks_from("p0", "# A", "p1", "p2", "## B", "p3", "# C", "p4")
        root = parse_heading_tree(blocks)
        assert root.body == [0]
        a, c = root.children
        assert (a.title, a.span, a.body) == ("A", (1, 6), [2, 3])
        assert (a.children[0].title, a.children[0].span, a.children[0].body) == ("B", (4, 6), [5])
        assert (c.title, c.span, c.body) == ("C", (6, 8), [7])

    def test_skipped_levels_nest_under_nearest(self):
        blocks = blocks_from("# A", "### D", "p0")
        root = parse_heading_tree(blocks)
        a = root.children[0]
        assert a.children[0].title == "D"
        assert a.children[0].body == [2]


class TestRecursiveChunk:
    POLICY = ChunkPolicy(max_chars=100, min_chars=30)

    def test_fitting_subtree_is_one_chunk(self):
        blocks = blocks_from("# H", "a" * 60, "b" * 20)
        chunks = chunk_blocks(blocks, self.POLICY)
        assert len(chunks) == 1
        c = chunks[0]
        assert c.heading_path == ["H"]
        assert c.text == "H\n\n" + "a" * 60 + "\n\n" + "b" * 20
        assert c.char_count == len(c.text) == 85
        assert c.chunk_id == "d:c0000"

    def test_oversized_subtree_splits_at_paragraphs(self):
        blocks = blocks_from("# H", "a" * 90, "b" * 20)
        chunks = chunk_blocks(blocks, self.POLICY)
        assert [c.body_text() for c in chunks] == ["a" * 90, "b" * 20]
        assert all(c.heading_path == ["H"] for c in chunks)
        assert all(c.char_count <= self.POLICY.max_chars for c in chunks)

    def test_size_budget_covers_the_prefix(self):
        # two 45-char paragraphs pack to 92 < 100, but the 11-char prefix
        # would push the chunk past max_chars, so they must split
        blocks = blocks_from("# Long Title", "a" * 45, "b" * 45)
        chunks = chunk_blocks(blocks, self.POLICY)
        assert len(chunks) == 2
        assert all(c.char_count <= self.POLICY.max_chars for c in chunks)

    def test_indivisible_paragraph_kept_whole(self):
        blocks = blocks_from("# H", "x" * 150)
        chunks = chunk_blocks(blocks, self.POLICY)
        assert len(chunks) == 1
        assert chunks[0].char_count > self.POLICY.max_chars
        assert "\n\n" not in chunks[0].body_text()

    def test_bodyless_parent_never_swallows_children(self):
        blocks = blocks_from("# A", "## B", "b" * 50, "## C", "c" * 50)
        chunks = chunk_blocks(blocks, ChunkPolicy(max_chars=200, min_chars=30))
        assert [c.heading_path for c in chunks] == [["A", "B"], ["A", "C"]]
        assert [c.body_text() for c in chunks] == ["b" * 50, "c" * 50]

    def test_parent_with_body_absorbs_fitting_child(self):
        blocks = blocks_from("# A", "p" * 40, "## B", "b" * 30)
        chunks = chunk_blocks(blocks, ChunkPolicy(max_chars=200, min_chars=30))
        assert len(chunks) == 1
        assert chunks[0].heading_path == ["A"]
        assert chunks[0].body_text() == "p" * 40 + "\n\n" + "b" * 30

    def test_text_before_any_heading_has_empty_path(self):
        blocks = blocks_from("preamble " * 5, "# A", "a" * 40)
        chunks = chunk_blocks(blocks, self.POLICY)
        assert chunks[0].heading_path == []
        assert chunks[0].text == chunks[0].body_text()

    def test_metadata_blocks_are_excluded(self):
        blocks = blocks_from("# H", "keep me", "137")
        blocks[2].is_metadata = True
        chunks = chunk_blocks(blocks, self.POLICY)
        assert len(chunks) == 1
        assert "137" not in chunks[0].text

    def test_corpus_wide_unique_ids_and_per_doc_sequences(self):
        blocks = blocks_from("# A", "a" * 40, doc_id="one") + blocks_from("# B", "b" * 40, doc_id="two")
        chunks = chunk_blocks(blocks, self.POLICY)
        assert [c.chunk_id for c in chunks] == ["one:c0000", "two:c0000"]
        assert [c.sequence for c in chunks] == [0, 0]

    def test_empty_input(self):
        assert chunk_blocks([], self.POLICY) == []

    def test_policy_validation(self):
        with pytest.raises(ValueError):
            ChunkPolicy(max_chars=100, min_chars=100)
        with pytest.raises(ValueError):
            ChunkPolicy(max_chars=100, min_chars=0)


class TestCoverageProperty:
    def check_doc(self, rng: random.Random, doc_id: str) -> None:
        md = make_random_markdown(rng, doc_id)
        blocks = ingest_corpus([RawDocument(doc_id, doc_id, md)])
        max_chars = rng.randint(150, 1200)
        policy = ChunkPolicy(max_chars=max_chars, min_chars=rng.randint(20, max_chars // 4))
        chunks = chunk_blocks(blocks, policy)

        expected = "\n\n".join(
            b.text for b in blocks if not b.is_metadata and heading_of(b.text) is None
        )
        got = "\n\n".join(c.body_text() for c in chunks)
        assert got == expected

        for c in chunks:
            assert c.text.startswith(render_prefix(c.heading_path))
            assert c.char_count == len(c.text)
            if c.char_count > policy.max_chars:
                # only an indivisible paragraph may exceed the cap
                assert "\n\n" not in c.body_text()

    def test_random_documents_round_trip(self):
        rng = random.Random(20260814)
        for i in range(10):
            self.check_doc(rng, f"doc{i}")

    def test_chunk_round_trip_via_json(self):
        blocks = blocks_from("# H", "a" * 60)
        chunks = chunk_blocks(blocks, ChunkPolicy(max_chars=100, min_chars=30))
        from geodistill.chunking import Chunk

        restored = Chunk.from_json(chunks[0].to_json())
        assert restored == chunks[0]
