"""Metadata-driven scoring engine with exact decimal arithmetic."""

from .errors import (
    EngineError,
    KindMismatch,
    MalformedModelFile,
    MalformedRequest,
    MissingAttribute,
    ModelNotFound,
    NoEligibleModel,
    NoMarkRuleMatched,
    NoMatchingRule,
    ParseError,
    ValidationRejected,
    VersionConflict,
)
from .model import (
    IndicatorSpec,
    MapperRule,
    MarkRule,
    MultiApplicantScorecard,
    Record,
    RoleSplit,
    ScorecardParameter,
    ScoringModel,
    SelectionBinding,
    WeightedAverageMapper,
    decode_model,
    encode_model,
)
from .pipeline import BatchReport, ScoreRequest, score_batch, score_one
from .registry import (
    Registry,
    RegistrySnapshot,
    delete_model,
    get_model,
    load_registry,
    upsert_model,
)
from .rulelang import (
    ExprPredicate,
    EqualsPredicate,
    InSetPredicate,
    RangePredicate,
    evaluate_expr,
    evaluate_predicate,
    format_expression,
    match_rule,
    parse_expression,
)
from .scoring import (
    Contribution,
    ScoreResult,
    explain,
    score_multi_applicant,
    score_weighted_average,
)
from .selection import SelectionOutcome, SelectionRequest, select_model
from .validation import ValidationFinding, has_errors, validate_document, validate_model

__version__ = "0.1.0"

__all__ = [
    "BatchReport",
    "Contribution",
    "EngineError",
    "EqualsPredicate",
    "ExprPredicate",
    "IndicatorSpec",
    "InSetPredicate",
    "KindMismatch",
    "MalformedModelFile",
    "MalformedRequest",
    "MapperRule",
    "MarkRule",
    "MissingAttribute",
    "ModelNotFound",
    "MultiApplicantScorecard",
    "NoEligibleModel",
    "NoMarkRuleMatched",
    "NoMatchingRule",
    "ParseError",
    "RangePredicate",
    "Record",
    "Registry",
    "RegistrySnapshot",
    "RoleSplit",
    "ScorecardParameter",
    "ScoreRequest",
    "ScoreResult",
    "ScoringModel",
    "SelectionBinding",
    "SelectionOutcome",
    "SelectionRequest",
    "ValidationFinding",
    "ValidationRejected",
    "VersionConflict",
    "WeightedAverageMapper",
    "decode_model",
    "delete_model",
    "encode_model",
    "evaluate_expr",
    "evaluate_predicate",
    "explain",
    "format_expression",
    "get_model",
    "has_errors",
    "load_registry",
    "match_rule",
    "parse_expression",
    "score_batch",
    "score_multi_applicant",
    "score_one",
    "score_weighted_average",
    "select_model",
    "upsert_model",
    "validate_document",
    "validate_model",
]
