"""Project configuration: one YAML file wires providers, model roles, and
stage policies to a project directory."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from geodistill.chunking import ChunkPolicy
from geodistill.domain import BudgetConfig
from geodistill.errors import ConfigError
from geodistill.evaluation import BoundaryPolicy
from geodistill.providers import FixtureSet, HttpProvider, MockProvider, ProviderConfig

CONFIG_FILENAME = "geodistill.yaml"


@dataclass(frozen=True)
class ModelRef:
    provider: str
    model: str


@dataclass(frozen=True)
class Roles:
    generator: ModelRef
    reasoner: ModelRef
    miner: ModelRef
    judge_pairwise: ModelRef
    judge_reference: ModelRef
    candidate_models: list[ModelRef]


@dataclass(frozen=True)
class ReviewSettings:
    bind_address: str = "127.0.0.1:8433"
    bearer_token: str = ""
    ui_dir: str | None = None  # built static assets; served at / when present


@dataclass(frozen=True)
class ReportPair:
    tuned: str
    base: str


@dataclass(frozen=True)
class ReportSettings:
    pairs: list[ReportPair] = field(default_factory=list)
    sizes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ProjectConfig:
    project_dir: Path
    providers: dict[str, ProviderConfig]
    roles: Roles
    chunk_policy: ChunkPolicy = field(default_factory=ChunkPolicy)
    boundary: BoundaryPolicy = field(default_factory=BoundaryPolicy)
    budgets: BudgetConfig = field(default_factory=BudgetConfig)
    review: ReviewSettings = field(default_factory=ReviewSettings)
    report: ReportSettings = field(default_factory=ReportSettings)
    pool_per_chunk: int = 2
    seed: int = 7


def _model_ref(raw, where: str, known_providers: set[str]) -> ModelRef:
    if not isinstance(raw, dict) or "provider" not in raw or "model" not in raw:
        raise ConfigError(f"{where}: expected a mapping with 'provider' and 'model'")
    ref = ModelRef(provider=str(raw["provider"]), model=str(raw["model"]))
    if ref.provider not in known_providers:
        raise ConfigError(f"{where}: unknown provider {ref.provider!r}")
    return ref


def _subconfig(cls, raw, where: str):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping")
    allowed = {f.name for f in fields(cls)}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(config_path: Path, project_dir: Path | None = None) -> ProjectConfig:
    config_path = Path(config_path)
    if not config_path.exists():
        raise ConfigError(f"config file not found: {config_path}")
    try:
        raw = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {config_path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{config_path}: top level must be a mapping")

    base_dir = config_path.parent
    resolved_dir = Path(project_dir) if project_dir else base_dir / raw.get("project_dir", ".")

    providers_raw = raw.get("providers")
    if not isinstance(providers_raw, dict) or not providers_raw:
        raise ConfigError("config needs a non-empty 'providers' mapping")
    providers: dict[str, ProviderConfig] = {}
    for pid, pcfg in providers_raw.items():
        cfg = _subconfig(ProviderConfig, pcfg, f"providers.{pid}")
        if cfg.fixtures is not None:
            # fixture paths are written relative to the config file
            cfg = ProviderConfig(
                **{**cfg.__dict__, "fixtures": str((base_dir / cfg.fixtures).resolve())}
            )
        providers[str(pid)] = cfg

    roles_raw = raw.get("roles")
    if not isinstance(roles_raw, dict):
        raise ConfigError("config needs a 'roles' mapping")
    known = set(providers)
    try:
        candidates_raw = roles_raw["candidate_models"]
    except KeyError:
        raise ConfigError("roles: missing 'candidate_models'") from None
    if not isinstance(candidates_raw, list) or not candidates_raw:
        raise ConfigError("roles.candidate_models must be a non-empty list")
    roles = Roles(
        generator=_model_ref(roles_raw.get("generator"), "roles.generator", known),
        reasoner=_model_ref(roles_raw.get("reasoner"), "roles.reasoner", known),
        miner=_model_ref(roles_raw.get("miner"), "roles.miner", known),
        judge_pairwise=_model_ref(roles_raw.get("judge_pairwise"), "roles.judge_pairwise", known),
        judge_reference=_model_ref(roles_raw.get("judge_reference"), "roles.judge_reference", known),
        candidate_models=[
            _model_ref(c, f"roles.candidate_models[{i}]", known)
            for i, c in enumerate(candidates_raw)
        ],
    )

    report_raw = raw.get("report") or {}
    if not isinstance(report_raw, dict):
        raise ConfigError("report: expected a mapping")
    pairs = [
        _subconfig(ReportPair, p, f"report.pairs[{i}]")
        for i, p in enumerate(report_raw.get("pairs") or [])
    ]
    sizes = {str(k): str(v) for k, v in (report_raw.get("sizes") or {}).items()}

    return ProjectConfig(
        project_dir=resolved_dir,
        providers=providers,
        roles=roles,
        chunk_policy=_subconfig(ChunkPolicy, raw.get("chunk_policy"), "chunk_policy"),
        boundary=_subconfig(BoundaryPolicy, raw.get("boundary"), "boundary"),
        budgets=_subconfig(BudgetConfig, raw.get("budgets"), "budgets"),
        review=_subconfig(ReviewSettings, raw.get("review"), "review"),
        report=ReportSettings(pairs=pairs, sizes=sizes),
        pool_per_chunk=int(raw.get("pool_per_chunk", 2)),
        seed=int(raw.get("seed", 7)),
    )


def build_provider(provider_id: str, cfg: ProviderConfig, cache_dir: Path | None = None):
    """Fixture-backed providers are deterministic mocks; everything else goes
    over HTTP with caching."""
    if cfg.fixtures is not None:
        return MockProvider(FixtureSet.load(Path(cfg.fixtures)), provider_id=provider_id)
    return HttpProvider(provider_id, cfg, cache_dir=cache_dir)


def build_providers(cfg: ProjectConfig) -> dict[str, object]:
    cache_dir = cfg.project_dir / "cache"
    return {pid: build_provider(pid, pcfg, cache_dir) for pid, pcfg in cfg.providers.items()}
