"""Score aggregation into the benchmark report: per-dimension means, macro
average, deltas against base models, and paired-test significance."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from decimal import ROUND_HALF_UP, Decimal

from geodistill.errors import GeodistillError
from geodistill.evaluation import DIMENSIONS, EvalQuestion, RefScore
from geodistill.stats import (  # noqa: F401  (public re-exports)
    PairedSample,
    TooFewSamples,
    ZeroVariance,
    format_p_value,
    paired_t_test,
    student_t_two_sided_log10_p,
    student_t_two_sided_p,
)


class MissingDimension(GeodistillError):
    """A cognitive dimension has zero scored questions."""


class UnmatchedScore(GeodistillError):
    """A score references a question that is not in the benchmark."""


@dataclass(frozen=True)
class DimensionBreakdown:
    concept_mean: float
    process_mean: float
    engineering_mean: float
    macro_average: float
    n_concept: int
    n_process: int
    n_engineering: int

    def __post_init__(self):
        if min(self.n_concept, self.n_process, self.n_engineering) < 1:
            raise ValueError("every dimension needs at least one score")


@dataclass(frozen=True)
class BenchmarkReport:
    model: str
    breakdown: DimensionBreakdown
    delta_vs_base: float | None = None
    t_stat: float | None = None
    df: int | None = None
    p_value: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def round2(value: float) -> float:
    """Render-time rounding; ties away from zero, matching hand-rounded tables."""
    return float(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def aggregate_report(scores: list[RefScore], questions: list[EvalQuestion]) -> DimensionBreakdown:
    """Arithmetic mean per dimension; macro average is the mean of the three
    dimension means, kept at full precision (rounding happens when rendering)."""
    dimension_of = {q.question_id: q.dimension for q in questions}
    buckets: dict[str, list[float]] = {dim: [] for dim in DIMENSIONS}
    for score in scores:
        dim = dimension_of.get(score.question_id)
        if dim is None:
            raise UnmatchedScore(f"score for unknown question {score.question_id}")
        buckets[dim].append(score.score)
    for dim in DIMENSIONS:
        if not buckets[dim]:
            raise MissingDimension(f"no scores in dimension {dim}")
    means = {dim: sum(buckets[dim]) / len(buckets[dim]) for dim in DIMENSIONS}
    return DimensionBreakdown(
        concept_mean=means["Concept"],
        process_mean=means["Process"],
        engineering_mean=means["Engineering"],
        macro_average=sum(means.values()) / 3.0,
        n_concept=len(buckets["Concept"]),
        n_process=len(buckets["Process"]),
        n_engineering=len(buckets["Engineering"]),
    )


def compute_delta(tuned: DimensionBreakdown, base: DimensionBreakdown) -> float:
    return tuned.macro_average - base.macro_average


def _fmt_delta(delta: float | None) -> str:
    if delta is None:
        return "-"
    rounded = round2(delta)
    return f"{rounded:+.2f}"


def render_markdown(reports: list[BenchmarkReport], sizes: dict[str, str] | None = None) -> str:
    """Markdown table with the canonical column set: Model, Size, Concept,
    Process, Engineering, Average, Delta; significance footnotes per model."""
    sizes = sizes or {}
    lines = [
        "| Model | Size | Concept | Process | Engineering | Average | Δ |",
        "| --- | --- | --- | --- | --- | --- | --- |",
    ]
    footnotes = []
    for r in reports:
        b = r.breakdown
        lines.append(
            "| {model} | {size} | {c:.2f} | {p:.2f} | {e:.2f} | {avg:.2f} | {delta} |".format(
                model=r.model,
                size=sizes.get(r.model, "-"),
                c=round2(b.concept_mean),
                p=round2(b.process_mean),
                e=round2(b.engineering_mean),
                avg=round2(b.macro_average),
                delta=_fmt_delta(r.delta_vs_base),
            )
        )
        if r.t_stat is not None and r.p_value is not None and r.df is not None:
            footnotes.append(
                f"- {r.model}: paired t-test t = {r.t_stat:.4f}, df = {r.df}, "
                f"p = {format_p_value(r.p_value)}"
            )
    if footnotes:
        lines.append("")
        lines.extend(footnotes)
    return "\n".join(lines) + "\n"
