"""Question generation and think-trace answer construction.

Emitted training pairs follow the two-message chat schema where the assistant
content opens with an explicit reasoning trace:

    {"messages": [{"role": "user", "content": <question>},
                  {"role": "assistant", "content": "<think>\\n...\\n</think>\\n\\n<answer>"}]}
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from geodistill import prompts
from geodistill.chunking import Chunk
from geodistill.domain import QuestionBudget
from geodistill.errors import GeodistillError
from geodistill.ingest import normalize_text
from geodistill.providers.base import ChatRequest

logger = logging.getLogger(__name__)

QUESTION_RETRIES = 2
GENERATION_TEMPERATURE = 0.7  # judges run at 0.0; generation wants variety

THINK_SHAPE = re.compile(r"\A<think>\n(?P<think>.*?)\n</think>\n\n(?P<answer>.*)\Z", re.DOTALL)


class NoQuestions(GeodistillError):
    """Generator produced zero usable questions after retries."""


class MalformedAnswer(GeodistillError):
    """Reasoner response has no think trace and cannot be salvaged."""


@dataclass
class InstructionPair:
    pair_id: str
    chunk_id: str
    tags: list[str]
    messages: list[dict]
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "chunk_id": self.chunk_id,
            "tags": self.tags,
            "messages": self.messages,
            "provenance": self.provenance,
        }

    @classmethod
    def from_json(cls, d: dict) -> "InstructionPair":
        return cls(
            pair_id=d["pair_id"],
            chunk_id=d["chunk_id"],
            tags=list(d["tags"]),
            messages=[dict(m) for m in d["messages"]],
            provenance=dict(d.get("provenance", {})),
        )


@dataclass
class SynthesisJob:
    chunk: Chunk
    budget: QuestionBudget
    prior_questions: list[str]
    generator_model: str
    reasoner_model: str
    tag_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.budget.n_questions < 1:
            raise ValueError("synthesis jobs need a budget of at least 1")


def _parse_question_list(text: str) -> list[str]:
    from geodistill.parsing import parse_listed_items

    seen: set[str] = set()
    questions = []
    for item in parse_listed_items(text):
        key = normalize_text(item).casefold()
        if key and key not in seen:
            seen.add(key)
            questions.append(item)
    return questions


def generate_questions(job: SynthesisJob, provider) -> list[str]:
    """Ask the generator for exactly budget.n_questions distinct questions.

    Prior same-tag questions ride along with an instruction to avoid overlap.
    Short responses are retried; a partial harvest (>= 1) is returned with a
    warning rather than failing the chunk.
    """
    want = job.budget.n_questions
    prior = ""
    if job.prior_questions:
        listed = "\n".join(f"- {q}" for q in job.prior_questions)
        prior = f"Avoid semantic duplicates of these existing questions:\n{listed}\n"
    user = prompts.render(
        "question_generation",
        chunk=job.chunk.text,
        tags=", ".join(job.tag_labels),
        count=str(want),
        prior=prior,
    )
    collected: list[str] = []
    seen: set[str] = set()
    for attempt in range(QUESTION_RETRIES + 1):
        req = ChatRequest(
            provider_id=getattr(provider, "provider_id", "?"),
            model=job.generator_model,
            system="",
            user=user if attempt == 0 else user + f"\n\nReturn {want} distinct questions.",
            temperature=GENERATION_TEMPERATURE,
            request_tag="question_generation",
        )
        for q in _parse_question_list(provider.complete(req).text):
            key = normalize_text(q).casefold()
            if key not in seen:
                seen.add(key)
                collected.append(q)
        if len(collected) >= want:
            return collected[:want]
    if not collected:
        raise NoQuestions(f"chunk {job.chunk.chunk_id}: no usable questions after retries")
    logger.warning(
        "chunk %s: wanted %d questions, got %d", job.chunk.chunk_id, want, len(collected)
    )
    return collected


def ensure_think_shape(text: str, strict: bool = False) -> str:
    """Return assistant content in the think-trace shape, wrapping plain
    multi-paragraph answers unless strict mode is on."""
    if not _shape_violations(text):
        return text
    if strict or "<think>" in text:
        raise MalformedAnswer("response does not match the <think> trace shape")
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]
    if len(paragraphs) < 2:
        raise MalformedAnswer("single-paragraph response with no reasoning trace")
    return f"<think>\n{paragraphs[0]}\n</think>\n\n" + "\n\n".join(paragraphs[1:])


def _shape_violations(content: str) -> list[str]:
    m = THINK_SHAPE.match(content)
    if not m:
        return ["missing think block"]
    violations = []
    if not m.group("think").strip():
        violations.append("empty think body")
    if not m.group("answer").strip():
        violations.append("empty answer body")
    return violations


def generate_cot_answer(question: str, chunk: Chunk, provider, model: str,
                        strict: bool = False) -> str:
    """Produce assistant content grounded in the source chunk, with the
    reasoning trace ahead of the final answer."""
    if not question:
        raise ValueError("question must be non-empty")
    user = prompts.render("cot_answer", chunk=chunk.text, question=question)
    req = ChatRequest(
        provider_id=getattr(provider, "provider_id", "?"),
        model=model,
        system="",
        user=user,
        temperature=GENERATION_TEMPERATURE,
        request_tag="cot_answer",
    )
    return ensure_think_shape(provider.complete(req).text, strict=strict)


def validate_pair(pair: InstructionPair) -> list[str]:
    """All invariant violations for a pair; empty means valid. Never raises."""
    violations: list[str] = []
    messages = pair.messages or []
    user_msgs = [m for m in messages if m.get("role") == "user"]
    assistant_msgs = [m for m in messages if m.get("role") == "assistant"]
    if len(messages) != 2:
        violations.append("messages must contain exactly two entries")
    if not user_msgs:
        violations.append("missing user message")
    elif not str(user_msgs[0].get("content", "")).strip():
        violations.append("empty question")
    if not assistant_msgs:
        violations.append("missing assistant message")
    else:
        violations.extend(_shape_violations(str(assistant_msgs[0].get("content", ""))))
    if messages and messages[0].get("role") != "user":
        violations.append("user message must come first")
    return violations


def build_pair(pair_id: str, chunk: Chunk, tags: list[str], question: str,
               assistant_content: str, generator_model: str, reasoner_model: str) -> InstructionPair:
    pair = InstructionPair(
        pair_id=pair_id,
        chunk_id=chunk.chunk_id,
        tags=tags,
        messages=[
            {"role": "user", "content": question},
            {"role": "assistant", "content": assistant_content},
        ],
        provenance={
            "generator_model": generator_model,
            "reasoner_model": reasoner_model,
            "prompt_hash": prompts.prompt_hash("question_generation", "cot_answer"),
        },
    )
    problems = validate_pair(pair)
    if problems:
        raise MalformedAnswer(f"refusing invalid pair {pair_id}: {', '.join(problems)}")
    return pair
