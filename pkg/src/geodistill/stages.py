"""Pipeline stages over a flat project directory.

Every stage reads fixed-name artifacts produced by earlier stages and writes
its own, so a project directory is self-describing: blocks.jsonl, chunks.jsonl,
domain_tree.json, tags.jsonl, dataset.jsonl, pool.jsonl, answers/<model>.jsonl,
verdicts.jsonl, boundary.json, review/events.jsonl, benchmark.jsonl,
scores/<model>.jsonl, report.json. Stages fail fast with the exact missing
filename before doing any work.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

from geodistill import synthesis
from geodistill.chunking import Chunk, chunk_blocks
from geodistill.config import ModelRef, ProjectConfig, build_providers
from geodistill.domain import (
    ChunkTagging,
    DomainTree,
    allocate_questions,
    bind_tags,
    build_domain_tree,
)
from geodistill.errors import ConfigError, GeodistillError, MissingArtifact
from geodistill.evaluation import (
    EvalQuestion,
    ModelAnswer,
    PairwiseVerdict,
    RefScore,
    assign_ab,
    extract_question_pool,
    judge_pairwise,
    judge_reference,
    mark_boundary,
    mine_boundary,
    run_inference,
)
from geodistill.ingest import ingest_corpus, load_manifest, segment_blocks
from geodistill.io import read_json, read_jsonl, write_json, write_jsonl
from geodistill.reporting import (
    BenchmarkReport,
    PairedSample,
    ZeroVariance,
    aggregate_report,
    compute_delta,
    paired_t_test,
    render_markdown,
)
from geodistill.review import ReviewStore

log = logging.getLogger(__name__)

STAGES = (
    "ingest",
    "chunk",
    "tag",
    "synth",
    "pool",
    "infer",
    "judge",
    "mine",
    "score",
    "report",
    "serve",
    "finalize",
)

CORPUS_MANIFEST = "corpus/manifest.json"
BLOCKS = "blocks.jsonl"
CHUNKS = "chunks.jsonl"
DOMAIN_TREE = "domain_tree.json"
TAGS = "tags.jsonl"
DATASET = "dataset.jsonl"
POOL = "pool.jsonl"
VERDICTS = "verdicts.jsonl"
VERDICTS_META = "verdicts.meta.json"
BOUNDARY = "boundary.json"
EVENTS = "review/events.jsonl"
BENCHMARK = "benchmark.jsonl"
REPORT_JSON = "report.json"
REPORT_MD = "report.md"


@dataclass(frozen=True)
class StageResult:
    stage: str
    summary: str
    outputs: list[str]


def _require(project_dir: Path, *artifacts: str) -> None:
    for rel in artifacts:
        if not (project_dir / rel).exists():
            raise MissingArtifact(rel)


def _answers_file(model: str) -> str:
    return f"answers/{model}.jsonl"


def _scores_file(model: str) -> str:
    return f"scores/{model}.jsonl"


def _load_pool(project_dir: Path) -> list[EvalQuestion]:
    return [EvalQuestion(**row) for row in read_jsonl(project_dir / POOL)]


def _load_answers(project_dir: Path, model: str) -> dict[str, ModelAnswer]:
    rows = read_jsonl(project_dir / _answers_file(model))
    return {row["question_id"]: ModelAnswer(**row) for row in rows}


def _provider_for(ref: ModelRef, providers: dict):
    return providers[ref.provider]


# -- stage implementations ---------------------------------------------------


def stage_ingest(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, CORPUS_MANIFEST)
    docs = load_manifest(cfg.project_dir / CORPUS_MANIFEST)
    segmented = sum(len(segment_blocks(doc)) for doc in docs)
    blocks = ingest_corpus(docs)
    flagged = sum(1 for b in blocks if b.is_metadata)
    write_jsonl(cfg.project_dir / BLOCKS, [b.to_json() for b in blocks])
    return StageResult(
        "ingest",
        f"{len(blocks)} blocks from {len(docs)} documents "
        f"({flagged} metadata, {segmented - len(blocks)} duplicates dropped)",
        [BLOCKS],
    )


def stage_chunk(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, BLOCKS)
    from geodistill.ingest import TextBlock

    blocks = [TextBlock.from_json(row) for row in read_jsonl(cfg.project_dir / BLOCKS)]
    chunks = chunk_blocks(blocks, cfg.chunk_policy)
    oversized = sum(1 for c in chunks if c.char_count > cfg.chunk_policy.max_chars)
    write_jsonl(cfg.project_dir / CHUNKS, [c.to_json() for c in chunks])
    return StageResult(
        "chunk",
        f"{len(chunks)} chunks from {len(blocks)} blocks ({oversized} oversized kept whole)",
        [CHUNKS],
    )


def stage_tag(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, CHUNKS)
    chunks = [Chunk.from_json(row) for row in read_jsonl(cfg.project_dir / CHUNKS)]
    outline: list[list[str]] = []
    for chunk in chunks:
        if chunk.heading_path not in outline:
            outline.append(chunk.heading_path)
    ref = cfg.roles.generator
    provider = _provider_for(ref, providers)
    tree = build_domain_tree(outline, provider, ref.model)
    write_json(cfg.project_dir / DOMAIN_TREE, tree.to_json())
    taggings = [bind_tags(chunk, tree, provider, ref.model) for chunk in chunks]
    write_jsonl(cfg.project_dir / TAGS, [t.to_json() for t in taggings])
    fallbacks = sum(1 for t in taggings if t.confidence and t.confidence[0] < 1.0)
    return StageResult(
        "tag",
        f"{len(tree.nodes)} tree nodes; {len(taggings)} chunks tagged ({fallbacks} by fallback)",
        [DOMAIN_TREE, TAGS],
    )


def stage_synth(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, CHUNKS, TAGS, DOMAIN_TREE)
    chunks = [Chunk.from_json(row) for row in read_jsonl(cfg.project_dir / CHUNKS)]
    taggings = {
        t.chunk_id: t
        for t in (ChunkTagging.from_json(row) for row in read_jsonl(cfg.project_dir / TAGS))
    }
    tree = DomainTree.from_json(read_json(cfg.project_dir / DOMAIN_TREE))
    gen_ref, reason_ref = cfg.roles.generator, cfg.roles.reasoner
    gen_provider = _provider_for(gen_ref, providers)
    reason_provider = _provider_for(reason_ref, providers)

    pairs = []
    skipped = failed = 0
    prior_by_tag: dict[str, list[str]] = {}
    for chunk in chunks:
        tagging = taggings.get(chunk.chunk_id)
        if tagging is None:
            raise GeodistillError(f"chunk {chunk.chunk_id} has no tagging; rerun the tag stage")
        budget = allocate_questions(chunk, tagging, cfg.budgets, tree)
        if budget.n_questions == 0:
            skipped += 1
            continue
        primary_tag = tagging.tags[0]
        job = synthesis.SynthesisJob(
            chunk=chunk,
            budget=budget,
            prior_questions=list(prior_by_tag.get(primary_tag, [])),
            generator_model=gen_ref.model,
            reasoner_model=reason_ref.model,
            tag_labels=[tree.node(t).label for t in tagging.tags],
        )
        try:
            questions = synthesis.generate_questions(job, gen_provider)
        except synthesis.NoQuestions as exc:
            log.warning("%s", exc)
            failed += 1
            continue
        for k, question in enumerate(questions):
            try:
                content = synthesis.generate_cot_answer(
                    question, chunk, reason_provider, reason_ref.model
                )
                pair = synthesis.build_pair(
                    pair_id=f"{chunk.chunk_id}:p{k:02d}",
                    chunk=chunk,
                    tags=list(tagging.tags),
                    question=question,
                    assistant_content=content,
                    generator_model=gen_ref.model,
                    reasoner_model=reason_ref.model,
                )
            except synthesis.MalformedAnswer as exc:
                log.warning("%s", exc)
                failed += 1
                continue
            pairs.append(pair)
            prior_by_tag.setdefault(primary_tag, []).append(question)
    write_jsonl(cfg.project_dir / DATASET, [p.to_json() for p in pairs])
    return StageResult(
        "synth",
        f"{len(pairs)} instruction pairs ({skipped} chunks skipped, {failed} failures)",
        [DATASET],
    )


def stage_pool(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, CHUNKS)
    chunks = [Chunk.from_json(row) for row in read_jsonl(cfg.project_dir / CHUNKS)]
    ref = cfg.roles.miner
    questions = extract_question_pool(
        chunks, _provider_for(ref, providers), ref.model, per_chunk=cfg.pool_per_chunk
    )
    write_jsonl(cfg.project_dir / POOL, [asdict(q) for q in questions])
    return StageResult("pool", f"{len(questions)} candidate questions", [POOL])


def stage_infer(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, POOL)
    questions = _load_pool(cfg.project_dir)
    parts = []
    outputs = []
    for ref in cfg.roles.candidate_models:
        out_path = cfg.project_dir / _answers_file(ref.model)
        if force and out_path.exists():
            out_path.unlink()
        before = len(_load_answers(cfg.project_dir, ref.model)) if out_path.exists() else 0
        answers = run_inference(questions, ref.model, _provider_for(ref, providers), out_path)
        parts.append(f"{ref.model}: {len(answers)} answers ({len(answers) - before} new)")
        outputs.append(_answers_file(ref.model))
    return StageResult("infer", "; ".join(parts), outputs)


def _pairwise_models(cfg: ProjectConfig) -> tuple[ModelRef, ModelRef]:
    if len(cfg.roles.candidate_models) < 2:
        raise ConfigError("pairwise judging needs at least two candidate_models")
    return cfg.roles.candidate_models[0], cfg.roles.candidate_models[1]


def stage_judge(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    first, second = _pairwise_models(cfg)
    _require(cfg.project_dir, POOL, _answers_file(first.model), _answers_file(second.model))
    questions = _load_pool(cfg.project_dir)
    answers = {
        first.model: _load_answers(cfg.project_dir, first.model),
        second.model: _load_answers(cfg.project_dir, second.model),
    }
    judge_ref = cfg.roles.judge_pairwise
    provider = _provider_for(judge_ref, providers)
    verdicts = []
    skipped = 0
    for q in sorted(questions, key=lambda q: q.question_id):
        model_a, model_b = assign_ab(first.model, second.model, q.question_id, cfg.seed)
        ans_a = answers[model_a].get(q.question_id)
        ans_b = answers[model_b].get(q.question_id)
        if ans_a is None or ans_b is None:
            log.warning("question %s lacks answers from both models; skipped", q.question_id)
            skipped += 1
            continue
        verdicts.append(judge_pairwise(q, ans_a, ans_b, provider, judge_ref.model))
    write_jsonl(cfg.project_dir / VERDICTS, [asdict(v) for v in verdicts])
    write_json(
        cfg.project_dir / VERDICTS_META,
        {"seed": cfg.seed, "models": [first.model, second.model]},
    )
    return StageResult(
        "judge", f"{len(verdicts)} verdicts ({skipped} skipped)", [VERDICTS, VERDICTS_META]
    )


def stage_mine(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, POOL, VERDICTS)
    questions = _load_pool(cfg.project_dir)
    verdicts = [PairwiseVerdict(**row) for row in read_jsonl(cfg.project_dir / VERDICTS)]
    selected = mine_boundary(verdicts, cfg.boundary)
    updated = mark_boundary(questions, selected)
    write_jsonl(cfg.project_dir / POOL, [asdict(q) for q in updated])
    write_json(
        cfg.project_dir / BOUNDARY,
        {"threshold": cfg.boundary.threshold, "selected": selected},
    )
    return StageResult(
        "mine", f"{len(selected)} of {len(questions)} questions at the boundary", [BOUNDARY, POOL]
    )


def open_review_store(cfg: ProjectConfig) -> ReviewStore:
    """Open the project's review store, importing boundary questions that have
    not been imported yet (idempotent)."""
    _require(cfg.project_dir, POOL, BOUNDARY)
    store = ReviewStore(cfg.project_dir / EVENTS)
    boundary_ids = set(read_json(cfg.project_dir / BOUNDARY)["selected"])
    pending = [q for q in _load_pool(cfg.project_dir) if q.question_id in boundary_ids]
    imported = store.import_candidates(pending)
    if imported:
        log.info("imported %d boundary questions into review", imported)
    return store


def stage_finalize(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    store = open_review_store(cfg)
    path = store.finalize(cfg.project_dir, force=force)
    total = sum(1 for _ in read_jsonl(path))
    pending = store.pending_count()
    note = f", {pending} pending excluded" if pending else ""
    return StageResult(
        "finalize", f"{total} accepted questions{note}", [BENCHMARK, "benchmark.manifest.json"]
    )


def _load_benchmark(project_dir: Path) -> list[EvalQuestion]:
    return [EvalQuestion(**row) for row in read_jsonl(project_dir / BENCHMARK)]


def score_model(cfg: ProjectConfig, providers: dict, model: str) -> tuple[int, int]:
    """Reference-score one candidate model over the finalized benchmark.
    Returns (total scores, newly computed)."""
    _require(cfg.project_dir, BENCHMARK, _answers_file(model))
    benchmark = _load_benchmark(cfg.project_dir)
    answers = _load_answers(cfg.project_dir, model)
    judge_ref = cfg.roles.judge_reference
    provider = _provider_for(judge_ref, providers)

    out_path = cfg.project_dir / _scores_file(model)
    existing = (
        {row["question_id"]: RefScore(**row) for row in read_jsonl(out_path)}
        if out_path.exists()
        else {}
    )
    missing = [q.question_id for q in benchmark if q.question_id not in answers]
    if missing:
        raise GeodistillError(
            f"model {model} has no answers for benchmark questions: {', '.join(missing[:5])}"
            + (" …" if len(missing) > 5 else "")
        )
    scores = []
    new = 0
    for q in sorted(benchmark, key=lambda q: q.question_id):
        if q.question_id in existing:
            scores.append(existing[q.question_id])
            continue
        scores.append(judge_reference(q, answers[q.question_id], provider, judge_ref.model))
        new += 1
    out_path.parent.mkdir(parents=True, exist_ok=True)
    write_jsonl(out_path, [asdict(s) for s in scores])
    return len(scores), new


def stage_score(cfg: ProjectConfig, providers: dict, force: bool, model: str | None = None) -> StageResult:
    models = [model] if model else [ref.model for ref in cfg.roles.candidate_models]
    known = {ref.model for ref in cfg.roles.candidate_models}
    parts = []
    outputs = []
    for m in models:
        if m not in known:
            raise ConfigError(f"--model {m!r} is not in roles.candidate_models")
        if force:
            out = cfg.project_dir / _scores_file(m)
            if out.exists():
                out.unlink()
        total, new = score_model(cfg, providers, m)
        parts.append(f"{m}: {total} scores ({new} new)")
        outputs.append(_scores_file(m))
    return StageResult("score", "; ".join(parts), outputs)


def stage_report(cfg: ProjectConfig, providers: dict, force: bool) -> StageResult:
    _require(cfg.project_dir, BENCHMARK)
    benchmark = _load_benchmark(cfg.project_dir)
    scored: dict[str, list[RefScore]] = {}
    for ref in cfg.roles.candidate_models:
        path = cfg.project_dir / _scores_file(ref.model)
        if path.exists():
            scored[ref.model] = [RefScore(**row) for row in read_jsonl(path)]
    if not scored:
        raise MissingArtifact(_scores_file(cfg.roles.candidate_models[0].model))

    breakdowns = {m: aggregate_report(s, benchmark) for m, s in scored.items()}
    reports = []
    for m in sorted(breakdowns):
        delta = t_stat = p_value = None
        df = None
        for pair in cfg.report.pairs:
            if pair.tuned != m or pair.base not in breakdowns:
                continue
            delta = compute_delta(breakdowns[m], breakdowns[pair.base])
            tuned_by_id = {s.question_id: s.score for s in scored[m]}
            base_by_id = {s.question_id: s.score for s in scored[pair.base]}
            common = sorted(set(tuned_by_id) & set(base_by_id))
            if set(tuned_by_id) != set(base_by_id):
                log.warning(
                    "pair (%s, %s): score sets differ; t-test over %d common questions",
                    m, pair.base, len(common),
                )
            try:
                t_stat, df, p_value = paired_t_test(
                    PairedSample(tuple(tuned_by_id[qid] - base_by_id[qid] for qid in common))
                )
            except ZeroVariance:
                log.warning("pair (%s, %s): zero variance, no t-test", m, pair.base)
        reports.append(
            BenchmarkReport(
                model=m,
                breakdown=breakdowns[m],
                delta_vs_base=delta,
                t_stat=t_stat,
                df=df,
                p_value=p_value,
            )
        )
    write_json(cfg.project_dir / REPORT_JSON, {"reports": [r.to_json() for r in reports]})
    (cfg.project_dir / REPORT_MD).write_text(
        render_markdown(reports, cfg.report.sizes), encoding="utf-8"
    )
    return StageResult("report", f"{len(reports)} models reported", [REPORT_JSON, REPORT_MD])


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "chunk": stage_chunk,
    "tag": stage_tag,
    "synth": stage_synth,
    "pool": stage_pool,
    "infer": stage_infer,
    "judge": stage_judge,
    "mine": stage_mine,
    "finalize": stage_finalize,
    "report": stage_report,
}


def run_stage(
    stage: str,
    cfg: ProjectConfig,
    force: bool = False,
    model: str | None = None,
) -> StageResult:
    """Run one pipeline stage; `serve` is handled by the CLI (long-running)."""
    if stage not in STAGES:
        raise ConfigError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    if stage == "serve":
        raise ConfigError("serve is a long-running command; use the CLI's serve entry point")
    cfg.project_dir.mkdir(parents=True, exist_ok=True)
    providers = build_providers(cfg)
    if stage == "score":
        return stage_score(cfg, providers, force, model=model)
    return _STAGE_FUNCS[stage](cfg, providers, force)
