"""Scoring model domain types and their JSON document forms.

Weights, marks, percentages and range bounds travel as decimal strings in
model files. Equality and in-set literals use native JSON typing (string is
text, number is numeric, bool is boolean); exact non-integer numerics use
the tagged form {"decimal": "..."}.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union

from .errors import ParseError
from .numeric import (
    NUMERIC,
    VALUE_KINDS,
    AttrValue,
    decimal_text,
    decode_attr_value,
    encode_attr_value,
    kind_of,
    to_fraction,
)
from .rulelang import (
    EqualsPredicate,
    ExprPredicate,
    InSetPredicate,
    Predicate,
    RangePredicate,
)

WEIGHTED_AVERAGE_MAPPER = "weighted_average_mapper"
MULTI_APPLICANT_SCORECARD = "multi_applicant_scorecard"


@dataclass(frozen=True)
class IndicatorSpec:
    name: str
    value_kind: str
    weight: Fraction


@dataclass(frozen=True)
class MapperRule:
    rule_id: int
    priority: int
    conditions: dict[str, Predicate]
    marks: dict[str, Fraction]


@dataclass(frozen=True)
class WeightedAverageMapper:
    indicators: tuple[IndicatorSpec, ...]
    mapper_rules: tuple[MapperRule, ...]

    kind = WEIGHTED_AVERAGE_MAPPER


@dataclass(frozen=True)
class RoleSplit:
    primary_pct: Fraction
    co_pct: Fraction


@dataclass(frozen=True)
class MarkRule:
    predicate: Predicate
    mark: Fraction


@dataclass(frozen=True)
class ScorecardParameter:
    name: str
    weight: Fraction
    role_split: RoleSplit
    mark_rules: tuple[MarkRule, ...]


@dataclass(frozen=True)
class MultiApplicantScorecard:
    parameters: tuple[ScorecardParameter, ...]

    kind = MULTI_APPLICANT_SCORECARD


Algorithm = Union[WeightedAverageMapper, MultiApplicantScorecard]


@dataclass(frozen=True)
class SelectionBinding:
    application_ids: tuple[str, ...] = ()
    required_kpis: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScoringModel:
    model_id: int
    name: str
    version: int
    algorithm: Algorithm
    selection_binding: SelectionBinding = field(default_factory=SelectionBinding)


@dataclass(frozen=True)
class Record:
    record_id: str
    attributes: dict[str, AttrValue]


class ModelDecodeError(ValueError):
    """A model document field that cannot be decoded; carries its location."""

    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")
        self.message = message


# ---------------------------------------------------------------------------
# Decoding

def _require(doc: dict, key: str, location: str):
    if key not in doc:
        raise ModelDecodeError(location, f"missing field {key!r}")
    return doc[key]


def _positive_int(value, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ModelDecodeError(location, "must be a positive integer")
    return value


def _nonneg_int(value, location: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ModelDecodeError(location, "must be a non-negative integer")
    return value


def _nonempty_str(value, location: str) -> str:
    if not isinstance(value, str) or not value:
        raise ModelDecodeError(location, "must be a non-empty string")
    return value


def _decimal(value, location: str) -> Fraction:
    try:
        return to_fraction(value)
    except ValueError as exc:
        raise ModelDecodeError(location, str(exc)) from None


def decode_literal(obj, kind_hint: str | None, location: str) -> AttrValue:
    """Decode a predicate literal, honoring a declared indicator kind."""
    if isinstance(obj, str) and kind_hint == NUMERIC:
        try:
            return to_fraction(obj)
        except ValueError:
            raise ModelDecodeError(location, f"numeric literal expected, got {obj!r}") from None
    try:
        value = decode_attr_value(obj)
    except ValueError as exc:
        raise ModelDecodeError(location, str(exc)) from None
    if kind_hint is not None and kind_of(value) != kind_hint:
        raise ModelDecodeError(location, f"{kind_hint} literal expected, got {kind_of(value)}")
    return value


def decode_predicate(obj, location: str, kind_hint: str | None = None) -> Predicate:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ModelDecodeError(location, "predicate must be an object with exactly one of range/equals/in/expr")
    key, body = next(iter(obj.items()))
    if key == "range":
        if kind_hint not in (None, NUMERIC):
            raise ModelDecodeError(location, f"range predicate on a {kind_hint} indicator")
        if not isinstance(body, dict):
            raise ModelDecodeError(location, "range must be an object")
        lo = _decimal(_require(body, "min", location + ".min"), location + ".min")
        hi = _decimal(_require(body, "max", location + ".max"), location + ".max")
        min_inc = body.get("min_inclusive", True)
        max_inc = body.get("max_inclusive", True)
        if not isinstance(min_inc, bool) or not isinstance(max_inc, bool):
            raise ModelDecodeError(location, "inclusivity flags must be booleans")
        try:
            return RangePredicate(lo, hi, min_inc, max_inc)
        except ValueError as exc:
            raise ModelDecodeError(location, str(exc)) from None
    if key == "equals":
        return EqualsPredicate(decode_literal(body, kind_hint, location + ".equals"))
    if key == "in":
        if not isinstance(body, list) or not body:
            raise ModelDecodeError(location, "in-set must be a non-empty array")
        values = tuple(
            decode_literal(item, kind_hint, f"{location}.in[{i}]") for i, item in enumerate(body)
        )
        try:
            return InSetPredicate(values)
        except ValueError as exc:
            raise ModelDecodeError(location, str(exc)) from None
    if key == "expr":
        if not isinstance(body, str) or not body.strip():
            raise ModelDecodeError(location, "expr must be a non-empty string")
        try:
            return ExprPredicate.from_source(body)
        except ParseError as exc:
            raise ModelDecodeError(location, f"expression error: {exc.message}") from None
    raise ModelDecodeError(location, f"unknown predicate form {key!r}")


def _decode_indicator(obj, location: str) -> IndicatorSpec:
    if not isinstance(obj, dict):
        raise ModelDecodeError(location, "indicator must be an object")
    name = _nonempty_str(_require(obj, "name", location), location + ".name")
    value_kind = _require(obj, "value_kind", location)
    if value_kind not in VALUE_KINDS:
        raise ModelDecodeError(location + ".value_kind", f"must be one of {', '.join(VALUE_KINDS)}")
    weight = _decimal(_require(obj, "weight", location), location + ".weight")
    if weight < 0:
        raise ModelDecodeError(location + ".weight", "must not be negative")
    return IndicatorSpec(name, value_kind, weight)


def _decode_mapper_rule(obj, location: str, kinds: dict[str, str]) -> MapperRule:
    if not isinstance(obj, dict):
        raise ModelDecodeError(location, "rule must be an object")
    rule_id = _positive_int(_require(obj, "rule_id", location), location + ".rule_id")
    priority = _nonneg_int(obj.get("priority", 0), location + ".priority")
    raw_conditions = _require(obj, "conditions", location)
    if not isinstance(raw_conditions, dict):
        raise ModelDecodeError(location + ".conditions", "must be an object")
    conditions: dict[str, Predicate] = {}
    for attr, pred_obj in raw_conditions.items():
        conditions[attr] = decode_predicate(
            pred_obj, f"{location}.conditions.{attr}", kinds.get(attr)
        )
    raw_marks = _require(obj, "marks", location)
    if not isinstance(raw_marks, dict):
        raise ModelDecodeError(location + ".marks", "must be an object")
    marks = {
        attr: _decimal(value, f"{location}.marks.{attr}") for attr, value in raw_marks.items()
    }
    return MapperRule(rule_id, priority, conditions, marks)


def _decode_wam(obj, location: str) -> WeightedAverageMapper:
    raw_indicators = _require(obj, "indicators", location)
    if not isinstance(raw_indicators, list) or not raw_indicators:
        raise ModelDecodeError(location + ".indicators", "must be a non-empty array")
    indicators = tuple(
        _decode_indicator(item, f"{location}.indicators[{i}]") for i, item in enumerate(raw_indicators)
    )
    kinds = {spec.name: spec.value_kind for spec in indicators}
    raw_rules = obj.get("mapper_rules", [])
    if not isinstance(raw_rules, list):
        raise ModelDecodeError(location + ".mapper_rules", "must be an array")
    rules = []
    for i, item in enumerate(raw_rules):
        rule_location = f"{location}.mapper_rules[{i}]"
        if isinstance(item, dict) and "rule_id" in item:
            rule_location = f"{location}.mapper_rules[rule {item['rule_id']}]"
        rules.append(_decode_mapper_rule(item, rule_location, kinds))
    return WeightedAverageMapper(indicators, tuple(rules))


def _decode_role_split(obj, location: str) -> RoleSplit:
    if not isinstance(obj, dict):
        raise ModelDecodeError(location, "role_split must be an object")
    primary = _decimal(_require(obj, "primary_pct", location), location + ".primary_pct")
    co = _decimal(_require(obj, "co_pct", location), location + ".co_pct")
    return RoleSplit(primary, co)


def _decode_parameter(obj, location: str) -> ScorecardParameter:
    if not isinstance(obj, dict):
        raise ModelDecodeError(location, "parameter must be an object")
    name = _nonempty_str(_require(obj, "name", location), location + ".name")
    weight = _decimal(_require(obj, "weight", location), location + ".weight")
    if weight < 0:
        raise ModelDecodeError(location + ".weight", "must not be negative")
    role_split = _decode_role_split(_require(obj, "role_split", location), location + ".role_split")
    raw_rules = _require(obj, "mark_rules", location)
    if not isinstance(raw_rules, list) or not raw_rules:
        raise ModelDecodeError(location + ".mark_rules", "must be a non-empty array")
    mark_rules = []
    for i, item in enumerate(raw_rules):
        rule_location = f"{location}.mark_rules[{i}]"
        if not isinstance(item, dict):
            raise ModelDecodeError(rule_location, "mark rule must be an object")
        predicate = decode_predicate(_require(item, "predicate", rule_location), rule_location + ".predicate")
        mark = _decimal(_require(item, "mark", rule_location), rule_location + ".mark")
        mark_rules.append(MarkRule(predicate, mark))
    return ScorecardParameter(name, weight, role_split, tuple(mark_rules))


def _decode_scorecard(obj, location: str) -> MultiApplicantScorecard:
    raw_params = _require(obj, "parameters", location)
    if not isinstance(raw_params, list) or not raw_params:
        raise ModelDecodeError(location + ".parameters", "must be a non-empty array")
    parameters = []
    for i, item in enumerate(raw_params):
        param_location = f"{location}.parameters[{i}]"
        if isinstance(item, dict) and isinstance(item.get("name"), str):
            param_location = f"{location}.parameters[{item['name']}]"
        parameters.append(_decode_parameter(item, param_location))
    return MultiApplicantScorecard(tuple(parameters))


def _decode_binding(obj, location: str) -> SelectionBinding:
    if obj is None:
        return SelectionBinding()
    if not isinstance(obj, dict):
        raise ModelDecodeError(location, "selection_binding must be an object")
    app_ids = obj.get("application_ids", [])
    kpis = obj.get("required_kpis", [])
    if not isinstance(app_ids, list) or not all(isinstance(a, str) and a for a in app_ids):
        raise ModelDecodeError(location + ".application_ids", "must be an array of non-empty strings")
    if not isinstance(kpis, list) or not all(isinstance(k, str) and k for k in kpis):
        raise ModelDecodeError(location + ".required_kpis", "must be an array of non-empty strings")
    return SelectionBinding(tuple(app_ids), tuple(kpis))


def decode_model(doc) -> ScoringModel:
    """Decode a model document, raising ModelDecodeError on the first fault.

    validate_document reports all faults at once; this decoder backs the
    load path once a document is known to be clean.
    """
    if not isinstance(doc, dict):
        raise ModelDecodeError("$", "model document must be an object")
    model_id = _positive_int(_require(doc, "model_id", "model_id"), "model_id")
    name = _nonempty_str(_require(doc, "name", "name"), "name")
    version = _positive_int(_require(doc, "version", "version"), "version")
    algo_doc = _require(doc, "algorithm", "algorithm")
    if not isinstance(algo_doc, dict):
        raise ModelDecodeError("algorithm", "must be an object")
    kind = _require(algo_doc, "kind", "algorithm")
    if kind == WEIGHTED_AVERAGE_MAPPER:
        algorithm: Algorithm = _decode_wam(algo_doc, "algorithm")
    elif kind == MULTI_APPLICANT_SCORECARD:
        algorithm = _decode_scorecard(algo_doc, "algorithm")
    else:
        raise ModelDecodeError("algorithm.kind", f"unknown algorithm kind {kind!r}")
    binding = _decode_binding(doc.get("selection_binding"), "selection_binding")
    return ScoringModel(model_id, name, version, algorithm, binding)


def decode_record(doc, location: str = "record") -> Record:
    if not isinstance(doc, dict):
        raise ValueError(f"{location} must be an object")
    record_id = doc.get("record_id")
    if not isinstance(record_id, str) or not record_id:
        raise ValueError(f"{location}.record_id must be a non-empty string")
    raw_attrs = doc.get("attributes")
    if not isinstance(raw_attrs, dict):
        raise ValueError(f"{location}.attributes must be an object")
    attributes: dict[str, AttrValue] = {}
    for attr, value in raw_attrs.items():
        if not attr:
            raise ValueError(f"{location}.attributes has an empty attribute name")
        try:
            attributes[attr] = decode_attr_value(value)
        except ValueError as exc:
            raise ValueError(f"{location}.attributes.{attr}: {exc}") from None
    return Record(record_id, attributes)


# ---------------------------------------------------------------------------
# Encoding

def _encode_decimal(value: Fraction) -> str:
    return decimal_text(value)


def encode_literal(value: AttrValue):
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return {"decimal": decimal_text(value)}
    raise TypeError(f"not a literal: {value!r}")


def encode_predicate(predicate: Predicate) -> dict:
    if isinstance(predicate, RangePredicate):
        return {
            "range": {
                "min": _encode_decimal(predicate.min),
                "max": _encode_decimal(predicate.max),
                "min_inclusive": predicate.min_inclusive,
                "max_inclusive": predicate.max_inclusive,
            }
        }
    if isinstance(predicate, EqualsPredicate):
        return {"equals": encode_literal(predicate.value)}
    if isinstance(predicate, InSetPredicate):
        return {"in": [encode_literal(v) for v in predicate.values]}
    if isinstance(predicate, ExprPredicate):
        return {"expr": predicate.source}
    raise TypeError(f"not a predicate: {predicate!r}")


def encode_model(model: ScoringModel) -> dict:
    algo = model.algorithm
    if isinstance(algo, WeightedAverageMapper):
        algo_doc = {
            "kind": algo.kind,
            "indicators": [
                {"name": s.name, "value_kind": s.value_kind, "weight": _encode_decimal(s.weight)}
                for s in algo.indicators
            ],
            "mapper_rules": [
                {
                    "rule_id": rule.rule_id,
                    "priority": rule.priority,
                    "conditions": {a: encode_predicate(p) for a, p in rule.conditions.items()},
                    "marks": {a: _encode_decimal(m) for a, m in rule.marks.items()},
                }
                for rule in algo.mapper_rules
            ],
        }
    else:
        algo_doc = {
            "kind": algo.kind,
            "parameters": [
                {
                    "name": p.name,
                    "weight": _encode_decimal(p.weight),
                    "role_split": {
                        "primary_pct": _encode_decimal(p.role_split.primary_pct),
                        "co_pct": _encode_decimal(p.role_split.co_pct),
                    },
                    "mark_rules": [
                        {"predicate": encode_predicate(r.predicate), "mark": _encode_decimal(r.mark)}
                        for r in p.mark_rules
                    ],
                }
                for p in algo.parameters
            ],
        }
    return {
        "model_id": model.model_id,
        "name": model.name,
        "version": model.version,
        "algorithm": algo_doc,
        "selection_binding": {
            "application_ids": list(model.selection_binding.application_ids),
            "required_kpis": list(model.selection_binding.required_kpis),
        },
    }


def encode_record(record: Record) -> dict:
    return {
        "record_id": record.record_id,
        "attributes": {a: encode_attr_value(v) for a, v in record.attributes.items()},
    }


def with_version(model: ScoringModel, version: int) -> ScoringModel:
    return replace(model, version=version)


def model_summary(model: ScoringModel) -> dict:
    return {
        "model_id": model.model_id,
        "name": model.name,
        "version": model.version,
        "algorithm": model.algorithm.kind,
    }
