"""Shared fixtures: a disposable fixture-corpus project, a scripted provider,
and a random Markdown generator used by the chunker and dedup property tests."""

from __future__ import annotations

import random
import shutil
from pathlib import Path

import pytest
from hypothesis import settings

from geodistill.config import load_config
from geodistill.providers import ChatResponse
from geodistill.review import Decision
from geodistill.stages import open_review_store, run_stage

FIXTURES = Path(__file__).parent / "fixtures"

PIPELINE_STAGES = ("ingest", "chunk", "tag", "synth", "pool", "infer", "judge", "mine")

settings.register_profile("suite", deadline=None, max_examples=50, derandomize=True)
settings.load_profile("suite")


class ScriptedProvider:
    """Plays back canned responses in call order; an Exception entry is raised
    instead of returned. Records every request for assertion."""

    def __init__(self, responses, provider_id: str = "stub"):
        self.responses = list(responses)
        self.requests = []
        self.provider_id = provider_id

    @property
    def calls(self) -> int:
        return len(self.requests)

    def complete(self, req):
        self.requests.append(req)
        if not self.responses:
            raise AssertionError(f"provider script exhausted at call {len(self.requests)}")
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return ChatResponse(text=item, model=req.model)


@pytest.fixture
def project(tmp_path):
    """Fresh copy of the fixture corpus project (config + corpus + fixtures)."""
    shutil.copytree(FIXTURES / "corpus", tmp_path / "corpus")
    shutil.copy(FIXTURES / "fixtures.json", tmp_path / "fixtures.json")
    shutil.copy(FIXTURES / "geodistill.yaml", tmp_path / "geodistill.yaml")
    return tmp_path


@pytest.fixture
def cfg(project):
    return load_config(project / "geodistill.yaml")


def run_pipeline(cfg, upto: str = "mine"):
    """Run stages in order through `upto` (inclusive)."""
    for stage in PIPELINE_STAGES:
        run_stage(stage, cfg)
        if stage == upto:
            return


def accept_all(cfg):
    """Accept every vetting candidate; returns the store."""
    store = open_review_store(cfg)
    items, _ = store.list_candidates(status="vetting", page_size=200)
    for c in items:
        store.submit_decision(c.question_id, Decision(action="accept", expected_version=c.version))
    return store


# -- random document generation ------------------------------------------------

_WORDS = (
    "basalt granite shale gneiss subduction orogeny porosity aquifer strata "
    "fault anticline syncline erosion magma lithosphere feldspar quartz "
    "metamorphic sediment turbidite karst moraine fold shear stress strain "
    "permeability bedding cleavage foliation pluton dike sill xenolith"
).split()

_TITLES = (
    "Overview", "Mechanisms", "Field Methods", "Case Studies", "Properties",
    "Formation", "Classification", "Analysis", "Measurements", "Stability",
)

_METADATA_LINES = (
    "137",
    "Page 12",
    "(c) 2011 Elsevier. All rights reserved.",
    "ISBN 978-0-12-383874-4",
)


def make_random_markdown(rng: random.Random, doc_id: str, max_blocks: int = 40) -> str:
    """A random textbook-ish document: ATX headings at levels 1-4, unique
    paragraphs, and occasional page-furniture lines."""
    parts = []
    for i in range(rng.randint(5, max_blocks)):
        roll = rng.random()
        if roll < 0.25:
            level = rng.randint(1, 4)
            parts.append("#" * level + f" {rng.choice(_TITLES)} {doc_id}-{i}")
        elif roll < 0.33:
            parts.append(rng.choice(_METADATA_LINES))
        else:
            words = rng.choices(_WORDS, k=rng.randint(5, 90))
            parts.append(" ".join(words) + f" [{doc_id}-{i}]")
    return "\n\n".join(parts)
