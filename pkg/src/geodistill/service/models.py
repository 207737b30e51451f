"""Request/response schemas for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from geodistill.review import ReviewCandidate


class CandidateOut(BaseModel):
    question_id: str
    text: str
    reference_answer: str
    dimension: str
    status: str
    version: int
    editor_note: str

    @classmethod
    def from_candidate(cls, c: ReviewCandidate) -> "CandidateOut":
        return cls(
            question_id=c.question_id,
            text=c.text,
            reference_answer=c.reference_answer,
            dimension=c.dimension,
            status=c.status,
            version=c.version,
            editor_note=c.editor_note,
        )


class CandidatePage(BaseModel):
    items: list[CandidateOut]
    total: int
    page: int
    page_size: int


class DecisionIn(BaseModel):
    action: Literal["accept", "reject", "revise"]
    expected_version: int = Field(ge=0)
    edited_text: Optional[str] = None
    edited_reference: Optional[str] = None
    edited_dimension: Optional[str] = None
    note: Optional[str] = None


class FinalizeOut(BaseModel):
    path: str
    total: int
    counts: dict[str, int]
    sha256: str


class HealthOut(BaseModel):
    status: str = "ok"


class ErrorBody(BaseModel):
    error: str
    message: str


class StageRunIn(BaseModel):
    force: bool = False
    model: Optional[str] = None


class StageRunOut(BaseModel):
    stage: str
    summary: str
    outputs: list[str]
