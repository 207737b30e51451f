"""Fine-tuning presets must match the published hyperparameters exactly."""

from __future__ import annotations

import json
from dataclasses import asdict

import pytest

from geodistill.training import UnknownPreset, emit_training_config, get_preset


class TestPresets:
    def test_8b_field_for_field(self):
        assert asdict(get_preset("8b")) == {
            "name": "8b",
            "lora_rank": 32,
            "lora_alpha": 32,
            "lora_dropout": 0.05,
            "learning_rate": 2e-5,
            "precision": "fp16",
            "gradient_checkpointing": False,
            "batch_size": 4,
            "gradient_accumulation": 1,
            "target_modules": "all-linear",
            "optimizer": "adamw",
        }

    def test_27b_32b_field_for_field(self):
        assert asdict(get_preset("27b-32b")) == {
            "name": "27b-32b",
            "lora_rank": 64,
            "lora_alpha": 128,
            "lora_dropout": 0.05,
            "learning_rate": 1e-5,
            "precision": "bf16",
            "gradient_checkpointing": True,
            "batch_size": 2,
            "gradient_accumulation": 4,
            "target_modules": "all-linear",
            "optimizer": "adamw",
        }

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset, match="13b"):
            get_preset("13b")


class TestEmit:
    def test_emitted_file_carries_dataset_and_preset(self, tmp_path):
        out = emit_training_config("8b", tmp_path / "dataset.jsonl", tmp_path / "train_8b.json")
        payload = json.loads(out.read_text())
        assert payload["dataset_path"].endswith("dataset.jsonl")
        for key, value in asdict(get_preset("8b")).items():
            assert payload[key] == value
