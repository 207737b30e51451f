"""FastAPI application: review vetting endpoints plus remote stage execution.

All error responses share one shape: {"error": <code>, "message": <text>}.
Auth is a single shared bearer token; an empty configured token disables auth
(local development against fixtures).
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from geodistill.config import ProjectConfig
from geodistill.errors import ConfigError, GeodistillError, MissingArtifact
from geodistill.io import read_json
from geodistill.review import (
    Decision,
    InvalidDecision,
    NotFound,
    PendingItems,
    ReviewStore,
    VersionConflict,
)
from geodistill.service.models import (
    CandidateOut,
    CandidatePage,
    DecisionIn,
    FinalizeOut,
    HealthOut,
    StageRunIn,
    StageRunOut,
)
from geodistill.stages import STAGES, open_review_store, run_stage


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def create_app(cfg: ProjectConfig, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="geodistill review service", version="0.1.0")
    app.state.cfg = cfg
    app.state.store = None

    token = cfg.review.bearer_token

    def require_auth(request: Request) -> None:
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise ApiError(401, "unauthorized", "missing or invalid bearer token")

    def get_store() -> ReviewStore:
        if app.state.store is None:
            try:
                app.state.store = open_review_store(cfg)
            except MissingArtifact as exc:
                raise ApiError(404, "missing_artifact", str(exc)) from exc
        return app.state.store

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422, content={"error": "validation_error", "message": str(exc.errors())}
        )

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"error": "http_error", "message": str(exc.detail)},
        )

    @app.get("/api/health", response_model=HealthOut)
    async def health() -> HealthOut:
        return HealthOut()

    @app.get("/api/candidates", response_model=CandidatePage, dependencies=[Depends(require_auth)])
    async def list_candidates(
        status: str | None = Query(default=None),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=200),
    ) -> CandidatePage:
        store = get_store()
        try:
            items, total = store.list_candidates(status=status, page=page, page_size=page_size)
        except ValueError as exc:
            raise ApiError(422, "invalid_filter", str(exc)) from exc
        return CandidatePage(
            items=[CandidateOut.from_candidate(c) for c in items],
            total=total,
            page=page,
            page_size=page_size,
        )

    @app.get(
        "/api/candidates/{question_id}",
        response_model=CandidateOut,
        dependencies=[Depends(require_auth)],
    )
    async def get_candidate(question_id: str) -> CandidateOut:
        try:
            return CandidateOut.from_candidate(get_store().get(question_id))
        except NotFound as exc:
            raise ApiError(404, "not_found", str(exc)) from exc

    @app.post(
        "/api/candidates/{question_id}/decision",
        response_model=CandidateOut,
        dependencies=[Depends(require_auth)],
    )
    async def submit_decision(question_id: str, body: DecisionIn) -> CandidateOut:
        decision = Decision(
            action=body.action,
            expected_version=body.expected_version,
            edited_text=body.edited_text,
            edited_reference=body.edited_reference,
            edited_dimension=body.edited_dimension,
            note=body.note,
        )
        try:
            updated = get_store().submit_decision(question_id, decision)
        except NotFound as exc:
            raise ApiError(404, "not_found", str(exc)) from exc
        except VersionConflict as exc:
            raise ApiError(409, "version_conflict", str(exc)) from exc
        except InvalidDecision as exc:
            raise ApiError(422, "invalid_decision", str(exc)) from exc
        return CandidateOut.from_candidate(updated)

    @app.post("/api/finalize", response_model=FinalizeOut, dependencies=[Depends(require_auth)])
    async def finalize(force: bool = Query(default=False)) -> FinalizeOut:
        try:
            path = get_store().finalize(cfg.project_dir, force=force)
        except PendingItems as exc:
            raise ApiError(409, "pending_items", str(exc)) from exc
        manifest = read_json(cfg.project_dir / "benchmark.manifest.json")
        return FinalizeOut(
            path=str(path),
            total=manifest["total"],
            counts=manifest["counts"],
            sha256=manifest["sha256"],
        )

    @app.post(
        "/api/stages/{stage}", response_model=StageRunOut, dependencies=[Depends(require_auth)]
    )
    async def run_stage_endpoint(stage: str, body: StageRunIn) -> StageRunOut:
        if stage not in STAGES or stage == "serve":
            raise ApiError(422, "unknown_stage", f"cannot run stage {stage!r} over HTTP")
        try:
            result = run_stage(stage, cfg, force=body.force, model=body.model)
        except MissingArtifact as exc:
            raise ApiError(409, "missing_artifact", str(exc)) from exc
        except ConfigError as exc:
            raise ApiError(422, "config_error", str(exc)) from exc
        except GeodistillError as exc:
            raise ApiError(500, "stage_failed", str(exc)) from exc
        # stage runs can rewrite pool/boundary; rebuild the store lazily
        app.state.store = None
        return StageRunOut(stage=result.stage, summary=result.summary, outputs=result.outputs)

    resolved_ui = ui_dir or (Path(cfg.review.ui_dir) if cfg.review.ui_dir else None)
    if resolved_ui and Path(resolved_ui).is_dir():
        app.mount("/", StaticFiles(directory=str(resolved_ui), html=True), name="ui")

    return app
