"""Command-line entry point: one subcommand per pipeline stage, plus serve
and training-config emission. Exit codes: 0 success, 1 fatal, 2 config error."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from geodistill.config import CONFIG_FILENAME, load_config
from geodistill.errors import ConfigError, GeodistillError
from geodistill.stages import run_stage
from geodistill.training import UnknownPreset, emit_training_config

_UNIFORM_STAGES = (
    "ingest",
    "chunk",
    "tag",
    "synth",
    "pool",
    "infer",
    "judge",
    "mine",
    "report",
    "finalize",
)


def _load(project: str, config_path: str | None):
    path = Path(config_path) if config_path else Path(project) / CONFIG_FILENAME
    return load_config(path, project_dir=Path(project))


def _execute(stage: str, project: str, config_path: str | None, force: bool, model: str | None = None):
    try:
        cfg = _load(project, config_path)
        result = run_stage(stage, cfg, force=force, model=model)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except GeodistillError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"[{result.stage}] {result.summary}")


def _project_options(f):
    f = click.option("--force", is_flag=True, help="Recompute resumable outputs / exclude pending items.")(f)
    f = click.option("--config", "config_path", default=None, metavar="FILE",
                     help=f"Config file (default: <project>/{CONFIG_FILENAME}).")(f)
    f = click.option("--project", default=".", show_default=True, metavar="DIR",
                     help="Project directory holding all artifacts.")(f)
    return f


@click.group()
@click.version_option(package_name="geodistill")
def main():
    """Textbook-to-dataset synthesis and benchmark construction pipeline."""


def _make_stage_command(stage: str):
    @_project_options
    def command(project: str, config_path: str | None, force: bool):
        _execute(stage, project, config_path, force)

    command.__name__ = stage
    return click.command(name=stage, help=f"Run the {stage} stage.")(command)


for _stage in _UNIFORM_STAGES:
    main.add_command(_make_stage_command(_stage))


@main.command(help="Reference-score candidate models over the finalized benchmark.")
@_project_options
@click.option("--model", default=None, metavar="NAME",
              help="Score only this candidate model (default: all).")
def score(project: str, config_path: str | None, force: bool, model: str | None):
    _execute("score", project, config_path, force, model=model)


@main.command(help="Serve the review API (and UI when built).")
@_project_options
@click.option("--bind", default=None, metavar="HOST:PORT",
              help="Bind address (default: review.bind_address from config).")
def serve(project: str, config_path: str | None, force: bool, bind: str | None):
    try:
        cfg = _load(project, config_path)
        address = bind or cfg.review.bind_address
        host, _, port_text = address.rpartition(":")
        if not host or not port_text.isdigit():
            raise ConfigError(f"bind address must be HOST:PORT, got {address!r}")
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)

    import uvicorn

    from geodistill.service import create_app

    try:
        app = create_app(cfg)
    except GeodistillError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"serving review API on http://{address}/")
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


@main.command("train-config", help="Emit a fine-tuning config for a named preset.")
@click.argument("preset")
@click.option("--dataset", "dataset_path", default="dataset.jsonl", show_default=True,
              metavar="PATH", help="Training dataset the config points at.")
@click.option("--out", "out_path", default=None, metavar="PATH",
              help="Output file (default: train_<preset>.json).")
def train_config(preset: str, dataset_path: str, out_path: str | None):
    out = Path(out_path) if out_path else Path(f"train_{preset}.json")
    try:
        emit_training_config(preset, Path(dataset_path), out)
    except UnknownPreset as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"[train-config] wrote {out}")


if __name__ == "__main__":
    main()
