"""Engine error hierarchy with stable machine codes."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for domain failures.

    `code` is a stable machine code, `http_status` the API mapping.
    `step` is set by the pipeline to the step that failed.
    """

    code = "internal"
    http_status = 500

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}
        self.step: str | None = None

    @property
    def detail_text(self) -> str:
        """Short single-string detail used in batch output lines."""
        return self.message

    def to_doc(self) -> dict:
        doc = {"code": self.code, "message": self.message}
        if self.step:
            doc["step"] = self.step
        if self.details:
            doc["details"] = self.details
        return doc


class MalformedRequest(EngineError):
    code = "malformed_request"
    http_status = 400


class ParseError(EngineError):
    """Expression syntax error at a byte offset into the source text."""

    code = "parse_error"
    http_status = 400

    def __init__(self, offset: int, expected: str, found: str):
        self.offset = offset
        self.expected = expected
        self.found = found
        super().__init__(
            f"expected {expected}, found {found} at offset {offset}",
            {"offset": offset, "expected": expected, "found": found},
        )


class MissingAttribute(EngineError):
    code = "missing_attribute"
    http_status = 422

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"record is missing attribute {name!r}", {"attribute": name})

    @property
    def detail_text(self) -> str:
        return self.name


class KindMismatch(EngineError):
    code = "kind_mismatch"
    http_status = 422

    def __init__(self, name: str, expected: str, found: str):
        self.name = name
        self.expected = expected
        self.found = found
        super().__init__(
            f"attribute {name!r} has kind {found}, expected {expected}",
            {"attribute": name, "expected": expected, "found": found},
        )

    @property
    def detail_text(self) -> str:
        return self.name


class ModelNotFound(EngineError):
    code = "model_not_found"
    http_status = 404

    def __init__(self, model_id: int):
        self.model_id = model_id
        super().__init__(f"model {model_id} not found", {"model_id": model_id})


class NoEligibleModel(EngineError):
    code = "no_eligible_model"
    http_status = 422

    def __init__(self, application_id: str, missing_kpis_per_model: dict[int, list[str]]):
        self.application_id = application_id
        self.missing_kpis_per_model = missing_kpis_per_model
        super().__init__(
            f"no eligible model for application {application_id!r}",
            {
                "application_id": application_id,
                "missing_kpis_per_model": {str(k): v for k, v in missing_kpis_per_model.items()},
            },
        )


class NoMatchingRule(EngineError):
    code = "no_matching_rule"
    http_status = 422

    def __init__(self, record_id: str, nearest_misses: list[dict]):
        self.record_id = record_id
        self.nearest_misses = nearest_misses
        super().__init__(
            f"no rule matched record {record_id!r}",
            {"record_id": record_id, "nearest_misses": nearest_misses},
        )

    @property
    def detail_text(self) -> str:
        if self.nearest_misses:
            first = self.nearest_misses[0]
            return f"record {self.record_id}: rule {first['rule_id']} failed on {first['indicator']}"
        return f"record {self.record_id}: model has no rules"


class NoMarkRuleMatched(EngineError):
    """Scorecard parameter had no mark rule matching a role's value."""

    code = "no_matching_rule"
    http_status = 422

    def __init__(self, parameter: str, role: str, value=None):
        self.parameter = parameter
        self.role = role
        details = {"parameter": parameter, "role": role}
        if value is not None:
            details["value"] = value
        super().__init__(f"no mark rule matched {role} value for parameter {parameter!r}", details)

    @property
    def detail_text(self) -> str:
        return f"{self.parameter} ({self.role})"


class ValidationRejected(EngineError):
    code = "validation_rejected"
    http_status = 422

    def __init__(self, findings: list[dict]):
        self.findings = findings
        super().__init__(
            f"model rejected with {len(findings)} validation error(s)",
            {"findings": findings},
        )


class VersionConflict(EngineError):
    """Optimistic-concurrency failure: stored model version moved on."""

    code = "validation_rejected"
    http_status = 409

    def __init__(self, model_id: int, base_version: int, current_version: int):
        self.model_id = model_id
        super().__init__(
            f"model {model_id} is at version {current_version}, not {base_version}",
            {
                "findings": [
                    {
                        "severity": "error",
                        "code": "version_conflict",
                        "message": f"stored version is {current_version}, request was based on {base_version}",
                        "location": "base_version",
                    }
                ]
            },
        )


class IoFailure(EngineError):
    code = "internal"
    http_status = 500


class MalformedModelFile(EngineError):
    """A model file in the registry directory failed to load."""

    code = "internal"
    http_status = 500

    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"malformed model file {path}: {detail}", {"path": path})
