"""End-to-end scoring flows: one request, or an ordered NDJSON batch.

A batch pins one registry snapshot for its whole run, emits exactly one
output line per input line in input order regardless of parallelism, and
finishes with a report. CSV input converts to the NDJSON request form
before scoring.
"""

from __future__ import annotations

import csv
import json
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .errors import EngineError, MalformedRequest, ModelNotFound
from .model import MultiApplicantScorecard, Record, WeightedAverageMapper, decode_record
from .numeric import json_loads_exact
from .registry import RegistrySnapshot, get_model
from .scoring import ScoreResult, score_multi_applicant, score_weighted_average, with_selection
from .selection import SelectionRequest, select_model

HALT = "halt"
SKIP_AND_REPORT = "skip_and_report"


@dataclass(frozen=True)
class ScoreRequest:
    application_id: str
    record: Record
    model_id: int | None = None
    kpi_list: tuple[str, ...] = ()
    co_record: Record | None = None


@dataclass(frozen=True)
class BatchReport:
    total: int
    succeeded: int
    failed: int
    failures: tuple[dict, ...]
    elapsed_ms: int

    def to_doc(self) -> dict:
        return {
            "total": self.total,
            "succeeded": self.succeeded,
            "failed": self.failed,
            "failures": list(self.failures),
            "elapsed_ms": self.elapsed_ms,
        }


def decode_score_request(doc) -> ScoreRequest:
    """Decode one request document; any shape fault is a MalformedRequest."""
    if not isinstance(doc, dict):
        raise MalformedRequest("request must be a JSON object")
    application_id = doc.get("application_id")
    if not isinstance(application_id, str) or not application_id:
        raise MalformedRequest("application_id must be a non-empty string")
    model_id = doc.get("model_id")
    if model_id is not None and (isinstance(model_id, bool) or not isinstance(model_id, int)):
        raise MalformedRequest("model_id must be an integer when present")
    kpi_list = doc.get("kpi_list", [])
    if not isinstance(kpi_list, list) or not all(isinstance(k, str) and k for k in kpi_list):
        raise MalformedRequest("kpi_list must be an array of non-empty strings")
    if "record" not in doc:
        raise MalformedRequest("record is required")
    try:
        record = decode_record(doc["record"], "record")
    except ValueError as exc:
        raise MalformedRequest(str(exc)) from None
    co_record = None
    if doc.get("co_record") is not None:
        try:
            co_record = decode_record(doc["co_record"], "co_record")
        except ValueError as exc:
            raise MalformedRequest(str(exc)) from None
    return ScoreRequest(application_id, record, model_id, tuple(kpi_list), co_record)


def score_one(snapshot: RegistrySnapshot, request: ScoreRequest) -> ScoreResult:
    """Select a model, retrieve it, compute, and enrich. Errors carry the
    step they arose in (select, retrieve, compute)."""
    selection_request = SelectionRequest(
        application_id=request.application_id,
        explicit_model_id=request.model_id,
        provided_kpis=request.kpi_list,
        record_attribute_names=frozenset(request.record.attributes),
    )
    try:
        outcome = select_model(snapshot, selection_request)
    except ModelNotFound as exc:
        exc.step = "retrieve"
        raise
    except EngineError as exc:
        exc.step = exc.step or "select"
        raise

    try:
        model = get_model(snapshot, outcome.model_id)
    except EngineError as exc:
        exc.step = "retrieve"
        raise

    notes: tuple[str, ...] = ()
    try:
        if isinstance(model.algorithm, WeightedAverageMapper):
            if request.co_record is not None:
                notes = (f"co_record ignored: model {model.model_id} maps a single record",)
            result = score_weighted_average(model, request.record)
        elif isinstance(model.algorithm, MultiApplicantScorecard):
            result = score_multi_applicant(model, request.record, request.co_record)
        else:  # pragma: no cover - decode admits only the two kinds
            raise EngineError(f"unsupported algorithm on model {model.model_id}")
    except EngineError as exc:
        exc.step = exc.step or "compute"
        raise
    return with_selection(result, outcome, notes)


# ---------------------------------------------------------------------------
# NDJSON batch

def process_line(snapshot: RegistrySnapshot, line_number: int, line: str):
    """Score one NDJSON line. Returns (ok, output_line, failure_entry)."""
    record_id = None
    try:
        try:
            doc = json_loads_exact(line)
        except ValueError as exc:
            raise MalformedRequest(f"invalid JSON: {exc}") from None
        if isinstance(doc, dict):
            record = doc.get("record")
            if isinstance(record, dict) and isinstance(record.get("record_id"), str):
                record_id = record["record_id"]
        request = decode_score_request(doc)
        result = score_one(snapshot, request)
        out = json.dumps(
            {"ok": True, "result": result.to_doc()}, separators=(",", ":"), ensure_ascii=False
        )
        return True, out, None
    except EngineError as exc:
        out = json.dumps(
            {"ok": False, "line": line_number, "error": {"code": exc.code, "detail": exc.detail_text}},
            separators=(",", ":"),
            ensure_ascii=False,
        )
        failure = {
            "line_number": line_number,
            "record_id": record_id,
            "error_code": exc.code,
            "message": exc.message,
        }
        return False, out, failure


def default_parallelism() -> int:
    raw = os.environ.get("SCORING_BATCH_PARALLELISM", "")
    if raw.strip():
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
    return os.cpu_count() or 1


def score_batch(
    snapshot: RegistrySnapshot,
    lines,
    sink,
    error_policy: str = SKIP_AND_REPORT,
    parallelism: int = 1,
) -> BatchReport:
    """Score an iterable of NDJSON lines into `sink`, one output line per
    input line, in input order. Under halt the first failure stops the batch
    after the preceding output lines have been flushed."""
    if error_policy not in (HALT, SKIP_AND_REPORT):
        raise MalformedRequest(f"unknown error policy {error_policy!r}")
    start = time.perf_counter()
    total = succeeded = failed = 0
    failures: list[dict] = []

    def handle(item) -> bool:
        nonlocal total, succeeded, failed
        ok, out, failure = item
        total += 1
        if ok:
            succeeded += 1
            sink.write(out + "\n")
            return True
        failed += 1
        failures.append(failure)
        if error_policy == HALT:
            return False
        sink.write(out + "\n")
        return True

    numbered = ((i, line) for i, line in enumerate(lines, start=1))
    if parallelism <= 1:
        for number, line in numbered:
            if not handle(process_line(snapshot, number, line)):
                break
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            window: deque = deque()
            stopped = False
            for number, line in numbered:
                window.append(pool.submit(process_line, snapshot, number, line))
                if len(window) >= parallelism * 4:
                    if not handle(window.popleft().result()):
                        stopped = True
                        break
            while not stopped and window:
                if not handle(window.popleft().result()):
                    break
            for future in window:
                future.cancel()

    elapsed_ms = int((time.perf_counter() - start) * 1000)
    return BatchReport(total, succeeded, failed, tuple(failures), elapsed_ms)


# ---------------------------------------------------------------------------
# CSV ingestion

def _csv_cell_value(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        d = Decimal(text)
        if d.is_finite():
            if d == d.to_integral_value() and "e" not in text.lower() and "." not in text:
                return int(d)
            return {"decimal": text}
    except InvalidOperation:
        pass
    return text


def csv_to_request_lines(
    rows,
    application_id: str,
    model_id: int | None = None,
    record_id_column: str = "record_id",
    kpi_list: tuple[str, ...] = (),
):
    """Convert CSV text rows to NDJSON request lines.

    The header names the attributes; one designated column carries the
    record id. Empty cells omit the attribute; "true"/"false" become
    booleans; decimal-parseable cells become numerics; the rest is text.
    """
    reader = csv.reader(rows)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRequest("CSV input has no header row") from None
    if record_id_column not in header:
        raise MalformedRequest(f"CSV header has no {record_id_column!r} column")
    id_index = header.index(record_id_column)
    for row in reader:
        if not row or all(not cell for cell in row):
            continue
        attributes = {}
        for i, cell in enumerate(row):
            if i == id_index or i >= len(header) or cell == "":
                continue
            attributes[header[i]] = _csv_cell_value(cell)
        doc = {
            "application_id": application_id,
            "model_id": model_id,
            "kpi_list": list(kpi_list),
            "record": {"record_id": row[id_index] if id_index < len(row) else "", "attributes": attributes},
        }
        yield json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
