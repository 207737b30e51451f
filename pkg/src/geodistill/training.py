"""Fine-tuning hyperparameter presets and the neutral key-value config they
emit. Nothing here trains anything; adapting the emitted file to a specific
training framework is the user's job."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

from geodistill.errors import GeodistillError
from geodistill.io import write_json


class UnknownPreset(GeodistillError):
    pass


@dataclass(frozen=True)
class TrainingPreset:
    name: str
    lora_rank: int
    lora_alpha: int
    lora_dropout: float
    learning_rate: float
    precision: str
    gradient_checkpointing: bool
    batch_size: int
    gradient_accumulation: int
    target_modules: str = "all-linear"
    optimizer: str = "adamw"


PRESETS: dict[str, TrainingPreset] = {
    "8b": TrainingPreset(
        name="8b",
        lora_rank=32,
        lora_alpha=32,
        lora_dropout=0.05,
        learning_rate=2e-5,
        precision="fp16",
        gradient_checkpointing=False,
        batch_size=4,
        gradient_accumulation=1,
    ),
    "27b-32b": TrainingPreset(
        name="27b-32b",
        lora_rank=64,
        lora_alpha=128,
        lora_dropout=0.05,
        learning_rate=1e-5,
        precision="bf16",
        gradient_checkpointing=True,
        batch_size=2,
        gradient_accumulation=4,
    ),
}


def get_preset(name: str) -> TrainingPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


def emit_training_config(preset_name: str, dataset_path: Path, out_path: Path) -> Path:
    preset = get_preset(preset_name)
    payload = {"dataset_path": str(dataset_path), **asdict(preset)}
    write_json(out_path, payload)
    return out_path
