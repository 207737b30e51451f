"""Benchmark construction and scoring: pool extraction, comparative inference,
pairwise judging, boundary mining, and reference-guided scoring."""

from __future__ import annotations

import logging
import random
import re
from dataclasses import dataclass, replace
from pathlib import Path

from geodistill.chunking import Chunk
from geodistill.errors import GeodistillError
from geodistill.io import read_jsonl, write_jsonl
from geodistill.judging import call_pairwise, call_reference
from geodistill.parsing import extract_json_value
from geodistill.prompts import render
from geodistill.providers import ChatRequest, ProviderError

log = logging.getLogger(__name__)

DIMENSIONS = ("Concept", "Process", "Engineering")
FALLBACK_DIMENSION = "Process"
STATUSES = ("candidate", "boundary", "vetting", "accepted", "rejected")

INFERENCE_TEMPERATURE = 0.7
POOL_TEMPERATURE = 0.7
CLASSIFY_TEMPERATURE = 0.0


class EmptyPool(GeodistillError):
    """Pool extraction produced zero usable questions."""


class TooManyFailures(GeodistillError):
    """Inference failure fraction exceeded the tolerated threshold."""


@dataclass(frozen=True)
class EvalQuestion:
    question_id: str
    text: str
    reference_answer: str
    dimension: str
    status: str = "candidate"

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise ValueError(f"unknown dimension: {self.dimension!r}")
        if self.status not in STATUSES:
            raise ValueError(f"unknown status: {self.status!r}")
        if self.status == "accepted" and (not self.text.strip() or not self.reference_answer.strip()):
            raise ValueError(f"accepted question {self.question_id} has empty text or reference")


@dataclass(frozen=True)
class ModelAnswer:
    question_id: str
    model: str
    text: str


@dataclass(frozen=True)
class PairwiseVerdict:
    question_id: str
    model_a: str
    model_b: str
    score_a: float
    score_b: float
    justification: str

    def __post_init__(self):
        for label, value in (("score_a", self.score_a), ("score_b", self.score_b)):
            if not 0.0 <= value <= 10.0:
                raise ValueError(f"{label} out of range: {value}")


@dataclass(frozen=True)
class RefScore:
    question_id: str
    model: str
    score: float
    reason: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 10.0:
            raise ValueError(f"score out of range: {self.score}")


@dataclass(frozen=True)
class BoundaryPolicy:
    threshold: float = 4.0

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("boundary threshold must be >= 0")


def _parse_dimension(text: str) -> str | None:
    stripped = text.strip().strip(".").casefold()
    for dim in DIMENSIONS:
        if stripped == dim.casefold():
            return dim
    found = {dim for dim in DIMENSIONS if re.search(rf"\b{dim}\b", text, re.IGNORECASE)}
    if len(found) == 1:
        return found.pop()
    return None


def classify_dimension(question: str, provider, model: str) -> str:
    """One constrained-label call; anything unparseable falls back to Process."""
    req = ChatRequest(
        provider_id=provider.provider_id,
        model=model,
        system="",
        user=render("dimension_classification", question=question),
        temperature=CLASSIFY_TEMPERATURE,
        request_tag="dimension_classification",
    )
    text = provider.complete(req).text
    dim = _parse_dimension(text)
    if dim is None:
        log.warning("unparseable dimension %r; defaulting to %s", text.strip()[:80], FALLBACK_DIMENSION)
        return FALLBACK_DIMENSION
    return dim


def _parse_pool_items(text: str) -> list[tuple[str, str]]:
    items = extract_json_value(text, kind="array")
    if items is None:
        raise ValueError("no JSON array found in miner output")
    out = []
    for item in items:
        if not isinstance(item, dict):
            log.warning("skipping non-object pool item: %r", item)
            continue
        question = str(item.get("question", "")).strip()
        reference = str(item.get("reference_answer", item.get("reference", ""))).strip()
        if not question or not reference:
            log.warning("skipping pool item with empty question or reference")
            continue
        out.append((question, reference))
    return out


def extract_question_pool(
    chunks: list[Chunk], provider, miner_model: str, per_chunk: int = 2
) -> list[EvalQuestion]:
    """Mine candidate questions plus preliminary references from each chunk,
    then classify each into one of the three cognitive dimensions."""
    if not chunks:
        raise ValueError("extract_question_pool requires at least one chunk")
    questions: list[EvalQuestion] = []
    for chunk in chunks:
        req = ChatRequest(
            provider_id=provider.provider_id,
            model=miner_model,
            system="",
            user=render("pool_extraction", chunk=chunk.text, count=str(per_chunk)),
            temperature=POOL_TEMPERATURE,
            request_tag="pool_extraction",
        )
        try:
            items = _parse_pool_items(provider.complete(req).text)
        except ValueError as exc:
            log.warning("pool extraction failed for %s: %s", chunk.chunk_id, exc)
            continue
        for j, (question, reference) in enumerate(items):
            questions.append(
                EvalQuestion(
                    question_id=f"{chunk.chunk_id}:q{j:02d}",
                    text=question,
                    reference_answer=reference,
                    dimension=classify_dimension(question, provider, miner_model),
                    status="candidate",
                )
            )
    if not questions:
        raise EmptyPool("no candidate questions extracted from any chunk")
    return sorted(questions, key=lambda q: q.question_id)


def run_inference(
    questions: list[EvalQuestion],
    model: str,
    provider,
    out_path: Path,
    failure_threshold: float = 0.1,
) -> list[ModelAnswer]:
    """Answer every question with one model. Answers are persisted keyed by
    (question_id, model); already-answered items are skipped on rerun.
    Per-question failures are recorded beside the answers and the run keeps
    going; only a failure fraction above failure_threshold raises."""
    if not questions:
        raise ValueError("run_inference requires at least one question")
    existing: dict[str, ModelAnswer] = {}
    if out_path.exists():
        for row in read_jsonl(out_path):
            if row.get("model") == model:
                existing[row["question_id"]] = ModelAnswer(**row)

    answers: dict[str, ModelAnswer] = {}
    failures: list[dict] = []
    new_calls = 0
    for q in questions:
        if q.question_id in existing:
            answers[q.question_id] = existing[q.question_id]
            continue
        req = ChatRequest(
            provider_id=provider.provider_id,
            model=model,
            system="",
            user=render("inference", question=q.text),
            temperature=INFERENCE_TEMPERATURE,
            request_tag="inference",
        )
        try:
            text = provider.complete(req).text
        except ProviderError as exc:
            log.warning("inference failed for %s: %s", q.question_id, exc)
            failures.append({"question_id": q.question_id, "model": model, "error": str(exc)})
            continue
        answers[q.question_id] = ModelAnswer(question_id=q.question_id, model=model, text=text)
        new_calls += 1

    ordered = [answers[qid] for qid in sorted(answers)]
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_jsonl(out_path, [a.__dict__ for a in ordered])
    failures_path = out_path.with_name(out_path.stem + ".failures.jsonl")
    if failures:
        write_jsonl(failures_path, failures)
    elif failures_path.exists():
        failures_path.unlink()
    log.info("inference %s: %d answers (%d new), %d failures", model, len(ordered), new_calls, len(failures))
    if len(failures) > failure_threshold * len(questions):
        raise TooManyFailures(
            f"{len(failures)} of {len(questions)} questions failed for {model} "
            f"(threshold {failure_threshold:.0%}); partial answers persisted"
        )
    return ordered


def assign_ab(model_x: str, model_y: str, question_id: str, seed: int) -> tuple[str, str]:
    """Blind A/B slotting, deterministic per (seed, question_id)."""
    rng = random.Random(f"{seed}:{question_id}")
    return (model_x, model_y) if rng.random() < 0.5 else (model_y, model_x)


def judge_pairwise(
    q: EvalQuestion, a: ModelAnswer, b: ModelAnswer, provider, judge_model: str
) -> PairwiseVerdict:
    if not (a.question_id == b.question_id == q.question_id):
        raise ValueError("pairwise answers must belong to the judged question")
    score_a, score_b, raw = call_pairwise(provider, judge_model, q.text, a.text, b.text)
    return PairwiseVerdict(
        question_id=q.question_id,
        model_a=a.model,
        model_b=b.model,
        score_a=score_a,
        score_b=score_b,
        justification=raw,
    )


def mine_boundary(verdicts: list[PairwiseVerdict], policy: BoundaryPolicy) -> list[str]:
    """Question ids whose two scores differ by at most the threshold, inclusive."""
    selected = {v.question_id for v in verdicts if abs(v.score_a - v.score_b) <= policy.threshold}
    return sorted(selected)


def mark_boundary(questions: list[EvalQuestion], selected: list[str]) -> list[EvalQuestion]:
    chosen = set(selected)
    return [
        replace(q, status="boundary") if q.question_id in chosen and q.status == "candidate" else q
        for q in questions
    ]


def judge_reference(
    q: EvalQuestion, ans: ModelAnswer, provider, judge_model: str
) -> RefScore:
    """Reference-guided scoring of one answer. Depends only on (question,
    reference, answer); pairwise verdicts are never consulted."""
    if q.status != "accepted":
        raise ValueError(f"question {q.question_id} is not accepted (status={q.status})")
    if not q.reference_answer.strip():
        raise ValueError(f"question {q.question_id} has no reference answer")
    if ans.question_id != q.question_id:
        raise ValueError("answer does not belong to the judged question")
    score, reason, _raw = call_reference(
        provider, judge_model, q.text, q.reference_answer, ans.text
    )
    return RefScore(question_id=q.question_id, model=ans.model, score=score, reason=reason)
