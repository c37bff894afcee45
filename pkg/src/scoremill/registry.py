"""Model registry: one JSON file per model, immutable in-memory snapshots.

Writes serialize through a lock and persist to disk before the new snapshot
becomes visible; reads never block and keep whatever snapshot they hold.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

from .errors import IoFailure, MalformedModelFile, ModelNotFound, ValidationRejected, VersionConflict
from .model import ModelDecodeError, ScoringModel, decode_model, encode_model, with_version
from .numeric import json_loads_exact
from .validation import validate_document, validate_model

_MODEL_FILE_RE = re.compile(r"model-(\d+)\.json$")


def model_file_name(model_id: int) -> str:
    return f"model-{model_id}.json"


@dataclass(frozen=True)
class RegistrySnapshot:
    models: Mapping[int, ScoringModel]
    snapshot_version: int

    def __post_init__(self):
        # readers hold snapshots across writes; freeze the mapping too
        object.__setattr__(self, "models", MappingProxyType(dict(self.models)))


def load_registry(directory) -> RegistrySnapshot:
    """Load every model-<id>.json in the directory. Fail fast: any malformed
    file aborts the whole load rather than serving a partial registry."""
    path = Path(directory)
    if not path.is_dir():
        raise IoFailure(f"models directory {path} does not exist")
    models: dict[int, ScoringModel] = {}
    for file in sorted(path.glob("model-*.json")):
        if not _MODEL_FILE_RE.fullmatch(file.name):
            continue
        try:
            text = file.read_text(encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot read {file}: {exc}") from None
        try:
            doc = json_loads_exact(text)
        except ValueError as exc:
            raise MalformedModelFile(str(file), f"invalid JSON: {exc}") from None
        findings = validate_document(doc)
        errors = [f for f in findings if f.severity == "error"]
        if errors:
            detail = "; ".join(f"{f.code} at {f.location}: {f.message}" for f in errors)
            raise MalformedModelFile(str(file), detail)
        try:
            model = decode_model(doc)
        except ModelDecodeError as exc:
            raise MalformedModelFile(str(file), str(exc)) from None
        file_id = int(_MODEL_FILE_RE.fullmatch(file.name).group(1))
        if model.model_id != file_id:
            raise MalformedModelFile(
                str(file), f"file name says model {file_id} but document says {model.model_id}"
            )
        if model.model_id in models:
            raise MalformedModelFile(str(file), f"duplicate model_id {model.model_id}")
        models[model.model_id] = model
    return RegistrySnapshot(models, 1)


def get_model(snapshot: RegistrySnapshot, model_id: int) -> ScoringModel:
    try:
        return snapshot.models[model_id]
    except KeyError:
        raise ModelNotFound(model_id) from None


def _persist(model: ScoringModel, directory: Path):
    text = json.dumps(encode_model(model), indent=2, ensure_ascii=False) + "\n"
    target = directory / model_file_name(model.model_id)
    tmp = directory / (target.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, target)
    except OSError as exc:
        raise IoFailure(f"cannot write {target}: {exc}") from None


def upsert_model(snapshot: RegistrySnapshot, model: ScoringModel, directory) -> RegistrySnapshot:
    """Validate, persist, then return a new snapshot with the stored model.

    The stored version is previous + 1 (1 for a new model); the version on
    the incoming model is ignored. The input snapshot is never mutated.
    """
    findings = validate_model(model)
    errors = [f for f in findings if f.severity == "error"]
    if errors:
        raise ValidationRejected([f.to_doc() for f in errors])
    current = snapshot.models.get(model.model_id)
    stored = with_version(model, current.version + 1 if current else 1)
    _persist(stored, Path(directory))
    models = dict(snapshot.models)
    models[stored.model_id] = stored
    return RegistrySnapshot(models, snapshot.snapshot_version + 1)


def delete_model(snapshot: RegistrySnapshot, model_id: int, directory) -> RegistrySnapshot:
    if model_id not in snapshot.models:
        raise ModelNotFound(model_id)
    target = Path(directory) / model_file_name(model_id)
    try:
        target.unlink(missing_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot delete {target}: {exc}") from None
    models = dict(snapshot.models)
    del models[model_id]
    return RegistrySnapshot(models, snapshot.snapshot_version + 1)


class Registry:
    """Thread-safe holder of the current snapshot.

    Reads are a bare attribute load; writers serialize on a lock and publish
    a fresh snapshot only after the file hit disk.
    """

    def __init__(self, directory):
        self._directory = Path(directory)
        self._lock = threading.Lock()
        self._snapshot = load_registry(self._directory)

    @property
    def directory(self) -> Path:
        return self._directory

    def snapshot(self) -> RegistrySnapshot:
        return self._snapshot

    def upsert(self, model: ScoringModel, base_version: int | None = None) -> ScoringModel:
        with self._lock:
            current = self._snapshot.models.get(model.model_id)
            if base_version is not None:
                current_version = current.version if current else 0
                if base_version != current_version:
                    raise VersionConflict(model.model_id, base_version, current_version)
            snapshot = upsert_model(self._snapshot, model, self._directory)
            self._snapshot = snapshot
            return snapshot.models[model.model_id]

    def delete(self, model_id: int):
        with self._lock:
            self._snapshot = delete_model(self._snapshot, model_id, self._directory)
