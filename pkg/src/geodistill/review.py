"""Expert-vetting store: an append-only event log plus an in-memory snapshot.

Every mutation is validated against the snapshot, written to events.jsonl,
then applied. Replaying the log from an empty store reproduces the snapshot
exactly, which is what makes the audit trail trustworthy.
"""

from __future__ import annotations

import threading
import time
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from geodistill.errors import GeodistillError
from geodistill.evaluation import DIMENSIONS, EvalQuestion
from geodistill.io import append_jsonl, dumps, read_jsonl, sha256_file, sha256_text, write_json, write_jsonl

REVIEW_STATUSES = ("vetting", "accepted", "rejected")
ACTIONS = ("accept", "reject", "revise")
MAX_PAGE_SIZE = 200


class NotFound(GeodistillError):
    pass


class VersionConflict(GeodistillError):
    """Stale expected_version: someone else mutated the candidate first."""


class InvalidDecision(GeodistillError):
    pass


class PendingItems(GeodistillError):
    """Finalize refused while items are still in vetting."""


@dataclass(frozen=True)
class ReviewCandidate:
    question_id: str
    text: str
    reference_answer: str
    dimension: str
    status: str = "vetting"
    version: int = 0
    editor_note: str = ""

    def __post_init__(self):
        if self.status not in REVIEW_STATUSES:
            raise ValueError(f"unknown review status: {self.status!r}")
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension: {self.dimension!r}")
        if self.version < 0:
            raise ValueError("version must be non-negative")
        if self.status == "accepted" and (not self.text.strip() or not self.reference_answer.strip()):
            raise ValueError(f"accepted candidate {self.question_id} has empty text or reference")


@dataclass(frozen=True)
class Decision:
    action: str
    expected_version: int
    edited_text: str | None = None
    edited_reference: str | None = None
    edited_dimension: str | None = None
    note: str | None = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action: {self.action!r}")
        if self.expected_version < 0:
            raise ValueError("expected_version must be non-negative")


def candidate_hash(c: ReviewCandidate) -> str:
    return sha256_text(dumps(asdict(c)))


def _apply_decision(current: ReviewCandidate, d: Decision) -> ReviewCandidate:
    """Pure state transition; validation that needs store context stays in
    submit_decision."""
    if d.action == "accept":
        return replace(current, status="accepted", version=current.version + 1,
                       editor_note=d.note if d.note is not None else current.editor_note)
    if d.action == "reject":
        return replace(current, status="rejected", version=current.version + 1,
                       editor_note=d.note if d.note is not None else current.editor_note)
    return replace(
        current,
        text=d.edited_text if d.edited_text is not None else current.text,
        reference_answer=d.edited_reference if d.edited_reference is not None else current.reference_answer,
        dimension=d.edited_dimension if d.edited_dimension is not None else current.dimension,
        status="vetting",
        version=current.version + 1,
        editor_note=d.note if d.note is not None else current.editor_note,
    )


def _validate_revision(d: Decision) -> None:
    if d.action != "revise":
        return
    if d.edited_text is None and d.edited_reference is None and d.edited_dimension is None:
        raise InvalidDecision("revise requires at least one edited field")
    if d.edited_text is not None and not d.edited_text.strip():
        raise InvalidDecision("edited text must be non-empty")
    if d.edited_reference is not None and not d.edited_reference.strip():
        raise InvalidDecision("edited reference must be non-empty")
    if d.edited_dimension is not None and d.edited_dimension not in DIMENSIONS:
        raise InvalidDecision(f"unknown dimension: {d.edited_dimension!r}")


class ReviewStore:
    """Single-writer store; reads are snapshot lookups, writes serialize on a
    lock and commit through the event log before touching the snapshot."""

    def __init__(self, events_path: Path, clock=time.time):
        self.events_path = Path(events_path)
        self._clock = clock
        self._lock = threading.Lock()
        self._items: dict[str, ReviewCandidate] = {}
        if self.events_path.exists():
            for event in read_jsonl(self.events_path):
                self._replay_event(event)

    # -- event plumbing ----------------------------------------------------

    def _replay_event(self, event: dict) -> None:
        kind = event["kind"]
        if kind == "import":
            c = ReviewCandidate(**event["candidate"])
            self._items[c.question_id] = c
        elif kind == "decision":
            d = Decision(**event["decision"])
            current = self._items[event["question_id"]]
            self._items[event["question_id"]] = _apply_decision(current, d)
        else:
            raise ValueError(f"unknown event kind: {kind!r}")

    def _commit(self, event: dict) -> None:
        self.events_path.parent.mkdir(parents=True, exist_ok=True)
        append_jsonl(self.events_path, event)

    # -- operations ---------------------------------------------------------

    def import_candidates(self, questions: list[EvalQuestion]) -> int:
        """Bring boundary questions into vetting; already-imported ids are
        skipped so re-running the stage is harmless."""
        imported = 0
        with self._lock:
            for q in sorted(questions, key=lambda q: q.question_id):
                if q.question_id in self._items:
                    continue
                c = ReviewCandidate(
                    question_id=q.question_id,
                    text=q.text,
                    reference_answer=q.reference_answer,
                    dimension=q.dimension,
                )
                self._commit({"kind": "import", "ts": self._clock(), "candidate": asdict(c)})
                self._items[c.question_id] = c
                imported += 1
        return imported

    def get(self, question_id: str) -> ReviewCandidate:
        item = self._items.get(question_id)
        if item is None:
            raise NotFound(f"no candidate {question_id}")
        return item

    def list_candidates(
        self, status: str | None = None, page: int = 1, page_size: int = 50
    ) -> tuple[list[ReviewCandidate], int]:
        if page < 1:
            raise ValueError("page must be >= 1")
        if not 1 <= page_size <= MAX_PAGE_SIZE:
            raise ValueError(f"page_size must be in [1, {MAX_PAGE_SIZE}]")
        if status is not None and status not in REVIEW_STATUSES:
            raise ValueError(f"unknown review status: {status!r}")
        items = sorted(self._items.values(), key=lambda c: c.question_id)
        if status is not None:
            items = [c for c in items if c.status == status]
        total = len(items)
        start = (page - 1) * page_size
        return items[start : start + page_size], total

    def submit_decision(self, question_id: str, d: Decision) -> ReviewCandidate:
        with self._lock:
            current = self.get(question_id)
            if d.expected_version != current.version:
                raise VersionConflict(
                    f"{question_id}: expected version {d.expected_version}, "
                    f"stored version is {current.version}"
                )
            _validate_revision(d)
            updated = _apply_decision(current, d)
            self._commit(
                {
                    "kind": "decision",
                    "ts": self._clock(),
                    "question_id": question_id,
                    "decision": asdict(d),
                    "before_hash": candidate_hash(current),
                    "after_hash": candidate_hash(updated),
                }
            )
            self._items[question_id] = updated
            return updated

    def pending_count(self) -> int:
        return sum(1 for c in self._items.values() if c.status == "vetting")

    def snapshot(self) -> dict[str, ReviewCandidate]:
        return dict(self._items)

    def finalize(self, out_dir: Path, force: bool = False) -> Path:
        """Write the accepted set as benchmark.jsonl plus a manifest with
        per-dimension counts and the file's content hash. Deterministic: the
        same store state always produces byte-identical output."""
        with self._lock:
            pending = self.pending_count()
            if pending and not force:
                raise PendingItems(f"{pending} candidates still in vetting; use force to exclude them")
            accepted = sorted(
                (c for c in self._items.values() if c.status == "accepted"),
                key=lambda c: c.question_id,
            )
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            bench_path = out_dir / "benchmark.jsonl"
            write_jsonl(
                bench_path,
                [
                    {
                        "question_id": c.question_id,
                        "text": c.text,
                        "reference_answer": c.reference_answer,
                        "dimension": c.dimension,
                        "status": "accepted",
                    }
                    for c in accepted
                ],
            )
            counts = {dim: 0 for dim in DIMENSIONS}
            for c in accepted:
                counts[c.dimension] += 1
            write_json(
                out_dir / "benchmark.manifest.json",
                {"total": len(accepted), "counts": counts, "sha256": sha256_file(bench_path)},
            )
            return bench_path


def replay_store(events_path: Path) -> ReviewStore:
    """Rebuild a store purely from its event log (the audit-replay check)."""
    return ReviewStore(events_path)


def verify_audit_log(events_path: Path) -> bool:
    """Walk the log verifying every decision's before/after hashes against a
    fresh replay; any mismatch means the log was edited or corrupted."""
    items: dict[str, ReviewCandidate] = {}
    for event in read_jsonl(events_path):
        if event["kind"] == "import":
            c = ReviewCandidate(**event["candidate"])
            items[c.question_id] = c
        elif event["kind"] == "decision":
            current = items[event["question_id"]]
            if candidate_hash(current) != event["before_hash"]:
                return False
            updated = _apply_decision(current, Decision(**event["decision"]))
            if candidate_hash(updated) != event["after_hash"]:
                return False
            items[event["question_id"]] = updated
    return True
