"""Score computation for both algorithm kinds, with exact arithmetic.

Weighted-average mapper: the winning rule (lowest priority number, then
lowest rule_id) supplies per-indicator marks; the score is the weight-
weighted average of those marks. Multi-applicant scorecard: each parameter
maps the primary and co records to marks via ordered first-match rules,
blends them by the role split, and the score is the weighted average of
the blended marks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import (
    EngineError,
    KindMismatch,
    MalformedRequest,
    MissingAttribute,
    NoMarkRuleMatched,
    NoMatchingRule,
)
from .model import (
    MultiApplicantScorecard,
    Record,
    ScorecardParameter,
    ScoringModel,
    WeightedAverageMapper,
    encode_record,
)
from .numeric import AttrValue, decimal_text, encode_attr_value, fixed_text, kind_of
from .rulelang import describe_predicate, evaluate_predicate
from .selection import SelectionOutcome

COMPUTED_SCORE_ATTR = "Computed Score"


@dataclass(frozen=True)
class Contribution:
    indicator: str
    value: AttrValue | None
    mark: Fraction
    weight: Fraction
    weighted_term: Fraction
    share: Fraction

    def to_doc(self) -> dict:
        return {
            "indicator": self.indicator,
            "value": None if self.value is None else encode_attr_value(self.value),
            "mark": decimal_text(self.mark),
            "weight": decimal_text(self.weight),
            "weighted_term": decimal_text(self.weighted_term),
            "share": fixed_text(self.share, 6),
        }


@dataclass(frozen=True)
class ScoreResult:
    record_id: str
    model_id: int
    model_version: int
    computed_score: Fraction
    matched_rule_id: int | None
    contributions: tuple[Contribution, ...]
    enriched_record: Record
    selection: SelectionOutcome | None = None
    rationale: tuple[str, ...] = ()

    def to_doc(self) -> dict:
        return {
            "record_id": self.record_id,
            "model_id": self.model_id,
            "model_version": self.model_version,
            "computed_score": decimal_text(self.computed_score),
            "matched_rule_id": self.matched_rule_id,
            "selection": None if self.selection is None else self.selection.to_doc(),
            "contributions": [c.to_doc() for c in self.contributions],
            "enriched_record": encode_record(self.enriched_record),
            "rationale": list(self.rationale),
        }


def _reject_reserved(record: Record):
    if COMPUTED_SCORE_ATTR in record.attributes:
        raise MalformedRequest(
            f"record {record.record_id!r} already carries the reserved attribute {COMPUTED_SCORE_ATTR!r}"
        )


def _check_indicators(model: ScoringModel, record: Record):
    algorithm: WeightedAverageMapper = model.algorithm
    for spec in algorithm.indicators:
        if spec.name not in record.attributes:
            raise MissingAttribute(spec.name)
        found = kind_of(record.attributes[spec.name])
        if found != spec.value_kind:
            raise KindMismatch(spec.name, spec.value_kind, found)


def _contributions(names_values, marks: list[Fraction], weights: list[Fraction]):
    terms = [w * m for w, m in zip(weights, marks)]
    total = sum(terms)
    contributions = []
    for (name, value), mark, weight, term in zip(names_values, marks, weights, terms):
        share = term / total if total != 0 else Fraction(0)
        contributions.append(Contribution(name, value, mark, weight, term, share))
    return tuple(contributions), total


def score_weighted_average(model: ScoringModel, record: Record) -> ScoreResult:
    """Score a record against a weighted-average mapper model."""
    algorithm = model.algorithm
    if not isinstance(algorithm, WeightedAverageMapper):
        raise TypeError(f"model {model.model_id} is not a weighted-average mapper")
    _reject_reserved(record)
    _check_indicators(model, record)

    order = [spec.name for spec in algorithm.indicators]
    matched = []
    nearest_misses = []
    for rule in algorithm.mapper_rules:
        first_failure = None
        for name in order:
            predicate = rule.conditions.get(name)
            if predicate is None:
                continue
            if not evaluate_predicate(predicate, record, name):
                first_failure = (name, predicate)
                break
        if first_failure is None:
            matched.append(rule)
        else:
            name, predicate = first_failure
            nearest_misses.append(
                {
                    "rule_id": rule.rule_id,
                    "indicator": name,
                    "condition": describe_predicate(predicate),
                }
            )
    if not matched:
        raise NoMatchingRule(record.record_id, nearest_misses)
    winner = min(matched, key=lambda r: (r.priority, r.rule_id))

    weights = [spec.weight for spec in algorithm.indicators]
    marks = [winner.marks[name] for name in order]
    total_weight = sum(weights)
    if total_weight <= 0:
        raise EngineError("model has no positive indicator weight")
    names_values = [(name, record.attributes[name]) for name in order]
    contributions, total_term = _contributions(names_values, marks, weights)
    score = total_term / total_weight

    enriched = Record(record.record_id, {**record.attributes, COMPUTED_SCORE_ATTR: score})
    return ScoreResult(
        record_id=record.record_id,
        model_id=model.model_id,
        model_version=model.version,
        computed_score=score,
        matched_rule_id=winner.rule_id,
        contributions=contributions,
        enriched_record=enriched,
    )


def _mark_for(parameter: ScorecardParameter, record: Record, role: str) -> Fraction:
    for rule in parameter.mark_rules:
        if evaluate_predicate(rule.predicate, record, parameter.name):
            return rule.mark
    value = record.attributes.get(parameter.name)
    raise NoMarkRuleMatched(
        parameter.name, role, None if value is None else encode_attr_value(value)
    )


def score_multi_applicant(
    model: ScoringModel, primary: Record, co: Record | None = None
) -> ScoreResult:
    """Score a primary applicant, blending in a co-applicant when present.

    Without a co record the blended mark is the primary mark alone; the
    role split only applies when both roles exist.
    """
    algorithm = model.algorithm
    if not isinstance(algorithm, MultiApplicantScorecard):
        raise TypeError(f"model {model.model_id} is not a multi-applicant scorecard")
    _reject_reserved(primary)
    if co is not None:
        _reject_reserved(co)

    names_values = []
    blended_marks: list[Fraction] = []
    weights: list[Fraction] = []
    rationale: list[str] = []
    for parameter in algorithm.parameters:
        primary_mark = _mark_for(parameter, primary, "primary")
        if co is None:
            blended = primary_mark
            rationale.append(f"{parameter.name}: primary mark {decimal_text(primary_mark)}")
        else:
            co_mark = _mark_for(parameter, co, "co")
            split = parameter.role_split
            blended = (split.primary_pct * primary_mark + split.co_pct * co_mark) / 100
            rationale.append(
                f"{parameter.name}: primary mark {decimal_text(primary_mark)} "
                f"({decimal_text(split.primary_pct)}%), co mark {decimal_text(co_mark)} "
                f"({decimal_text(split.co_pct)}%)"
            )
        names_values.append((parameter.name, primary.attributes.get(parameter.name)))
        blended_marks.append(blended)
        weights.append(parameter.weight)

    total_weight = sum(weights)
    if total_weight <= 0:
        raise EngineError("model has no positive parameter weight")
    contributions, total_term = _contributions(names_values, blended_marks, weights)
    score = total_term / total_weight

    enriched = Record(primary.record_id, {**primary.attributes, COMPUTED_SCORE_ATTR: score})
    return ScoreResult(
        record_id=primary.record_id,
        model_id=model.model_id,
        model_version=model.version,
        computed_score=score,
        matched_rule_id=None,
        contributions=contributions,
        enriched_record=enriched,
        rationale=tuple(rationale),
    )


def explain(result: ScoreResult) -> str:
    """Deterministic explanation text: contributions sorted by descending
    share, ties broken by indicator name."""
    lines = [f"model {result.model_id} version {result.model_version}"]
    lines.append(f"record {result.record_id}")
    if result.matched_rule_id is not None:
        lines.append(f"matched rule {result.matched_rule_id}")
    if result.selection is not None:
        lines.append(f"selection: {result.selection.rationale}")
    for note in result.rationale:
        lines.append(f"note: {note}")
    ordered = sorted(result.contributions, key=lambda c: (-c.share, c.indicator))
    for c in ordered:
        if c.value is None:
            value = "-"
        elif isinstance(c.value, bool):
            value = "TRUE" if c.value else "FALSE"
        else:
            value = encode_attr_value(c.value)
        lines.append(
            f"{c.indicator}: value {value}, mark {decimal_text(c.mark)}, "
            f"weight {decimal_text(c.weight)}, term {decimal_text(c.weighted_term)}, "
            f"share {fixed_text(c.share, 6)}"
        )
    lines.append(f"score {decimal_text(result.computed_score)}")
    return "\n".join(lines)


def with_selection(result: ScoreResult, outcome: SelectionOutcome, extra_notes: tuple[str, ...] = ()) -> ScoreResult:
    return replace(result, selection=outcome, rationale=extra_notes + result.rationale)
