from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from scoremill import Record, Registry, load_registry
from scoremill.numeric import json_loads_exact

DATA_DIR = Path(__file__).parent / "data"
MODELS_DIR = DATA_DIR / "models"


def model_1011_doc() -> dict:
    return json_loads_exact((MODELS_DIR / "model-1011.json").read_text(encoding="utf-8"))


def record_104532() -> Record:
    from scoremill.model import decode_record

    return decode_record(json_loads_exact((DATA_DIR / "record-104532.json").read_text(encoding="utf-8")))


def scorecard_doc(model_id: int = 2044) -> dict:
    """A small multi-applicant scorecard: two parameters, 65/35 and 50/50."""
    return {
        "model_id": model_id,
        "name": "joint-application-scorecard",
        "version": 1,
        "algorithm": {
            "kind": "multi_applicant_scorecard",
            "parameters": [
                {
                    "name": "ApplicantAge",
                    "weight": "10",
                    "role_split": {"primary_pct": "65", "co_pct": "35"},
                    "mark_rules": [
                        {"predicate": {"range": {"min": "18", "max": "29"}}, "mark": "40"},
                        {"predicate": {"range": {"min": "30", "max": "45"}}, "mark": "80"},
                        {"predicate": {"expr": "ApplicantAge > 45"}, "mark": "60"},
                    ],
                },
                {
                    "name": "EmploymentField",
                    "weight": "15",
                    "role_split": {"primary_pct": "50", "co_pct": "50"},
                    "mark_rules": [
                        {"predicate": {"in": ["Business", "Accountant"]}, "mark": "90"},
                        {"predicate": {"expr": "EmploymentField != ''"}, "mark": "50"},
                    ],
                },
            ],
        },
        "selection_binding": {
            "application_ids": ["JOINT-01"],
            "required_kpis": ["ApplicantAge", "EmploymentField"],
        },
    }


@pytest.fixture
def models_dir(tmp_path) -> Path:
    target = tmp_path / "models"
    target.mkdir()
    shutil.copy(MODELS_DIR / "model-1011.json", target / "model-1011.json")
    return target


@pytest.fixture
def snapshot(models_dir):
    return load_registry(models_dir)


@pytest.fixture
def registry(models_dir) -> Registry:
    return Registry(models_dir)


@pytest.fixture
def joint_models_dir(tmp_path) -> Path:
    target = tmp_path / "models"
    target.mkdir()
    shutil.copy(MODELS_DIR / "model-1011.json", target / "model-1011.json")
    (target / "model-2044.json").write_text(
        json.dumps(scorecard_doc(), indent=2) + "\n", encoding="utf-8"
    )
    return target


@pytest.fixture
def joint_snapshot(joint_models_dir):
    return load_registry(joint_models_dir)
