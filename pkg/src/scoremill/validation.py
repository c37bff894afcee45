"""Model document validation: collects every finding instead of stopping
at the first fault, so an editor can show them all inline."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .numeric import decimal_text
from .model import (
    MULTI_APPLICANT_SCORECARD,
    WEIGHTED_AVERAGE_MAPPER,
    ModelDecodeError,
    ScoringModel,
    _decode_binding,
    _decode_indicator,
    _decode_mapper_rule,
    _decode_parameter,
    _nonempty_str,
    _positive_int,
    encode_model,
)
from .rulelang import (
    EqualsPredicate,
    ExprPredicate,
    InSetPredicate,
    RangePredicate,
    expr_attrs,
)

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class ValidationFinding:
    severity: str
    code: str
    message: str
    location: str

    def to_doc(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "location": self.location,
        }


def has_errors(findings: list[ValidationFinding]) -> bool:
    return any(f.severity == ERROR for f in findings)


def validate_model(model: ScoringModel) -> list[ValidationFinding]:
    return validate_document(encode_model(model))


def validate_document(doc) -> list[ValidationFinding]:
    """Validate a raw model document. Returns findings sorted by
    (location, code); empty means the document is clean."""
    findings: list[ValidationFinding] = []

    def error(code: str, message: str, location: str):
        findings.append(ValidationFinding(ERROR, code, message, location))

    def warning(code: str, message: str, location: str):
        findings.append(ValidationFinding(WARNING, code, message, location))

    if not isinstance(doc, dict):
        error("invalid_document", "model document must be a JSON object", "$")
        return findings

    try:
        _positive_int(doc.get("model_id"), "model_id")
    except ModelDecodeError as exc:
        error("invalid_model_id", exc.message, "model_id")
    try:
        _nonempty_str(doc.get("name"), "name")
    except ModelDecodeError as exc:
        error("empty_name", exc.message, "name")
    try:
        _positive_int(doc.get("version"), "version")
    except ModelDecodeError as exc:
        error("invalid_version", exc.message, "version")

    try:
        _decode_binding(doc.get("selection_binding"), "selection_binding")
    except ModelDecodeError as exc:
        error("invalid_document", exc.message, exc.location)

    algo = doc.get("algorithm")
    if not isinstance(algo, dict):
        error("invalid_document", "algorithm must be an object", "algorithm")
    else:
        kind = algo.get("kind")
        if kind == WEIGHTED_AVERAGE_MAPPER:
            _validate_wam(algo, doc, error, warning)
        elif kind == MULTI_APPLICANT_SCORECARD:
            _validate_scorecard(algo, doc, error, warning)
        else:
            error("unknown_algorithm_kind", f"unknown algorithm kind {kind!r}", "algorithm.kind")

    findings.sort(key=lambda f: (f.location, f.code))
    return findings


# ---------------------------------------------------------------------------
# Weighted-average mapper

def _validate_wam(algo: dict, doc: dict, error, warning):
    raw_indicators = algo.get("indicators")
    indicators = []
    if not isinstance(raw_indicators, list) or not raw_indicators:
        error("empty_indicators", "indicators must be a non-empty array", "algorithm.indicators")
        raw_indicators = []
    seen_names: set[str] = set()
    for i, item in enumerate(raw_indicators):
        location = f"algorithm.indicators[{i}]"
        try:
            spec = _decode_indicator(item, location)
        except ModelDecodeError as exc:
            code = "negative_weight" if "negative" in exc.message else "invalid_indicator"
            error(code, exc.message, exc.location)
            continue
        if spec.name in seen_names:
            error("duplicate_indicator", f"indicator {spec.name!r} appears twice", location)
        seen_names.add(spec.name)
        indicators.append(spec)
    if indicators and all(s.weight == 0 for s in indicators):
        error("all_weights_zero", "every indicator weight is zero", "algorithm.indicators")

    names = [s.name for s in indicators]
    kinds = {s.name: s.value_kind for s in indicators}

    raw_rules = algo.get("mapper_rules", [])
    if not isinstance(raw_rules, list):
        error("invalid_document", "mapper_rules must be an array", "algorithm.mapper_rules")
        raw_rules = []
    decoded = []
    seen_ids: set[int] = set()
    for i, item in enumerate(raw_rules):
        rule_id = item.get("rule_id") if isinstance(item, dict) else None
        location = (
            f"algorithm.mapper_rules[rule {rule_id}]"
            if isinstance(rule_id, int)
            else f"algorithm.mapper_rules[{i}]"
        )
        try:
            rule = _decode_mapper_rule(item, location, kinds)
        except ModelDecodeError as exc:
            code = "expression_parse_error" if "expression error" in exc.message else "invalid_rule"
            error(code, exc.message, exc.location)
            continue
        if rule.rule_id in seen_ids:
            error("duplicate_rule_id", f"rule_id {rule.rule_id} appears twice", location)
            continue
        seen_ids.add(rule.rule_id)
        decoded.append((location, rule))
        if names:
            cond_keys = set(rule.conditions)
            mark_keys = set(rule.marks)
            expected = set(names)
            if cond_keys != expected:
                missing = sorted(expected - cond_keys)
                extra = sorted(cond_keys - expected)
                error(
                    "conditions_keys_mismatch",
                    _key_mismatch_message("conditions", missing, extra),
                    location + ".conditions",
                )
            if mark_keys != expected:
                missing = sorted(expected - mark_keys)
                extra = sorted(mark_keys - expected)
                error(
                    "marks_keys_mismatch",
                    _key_mismatch_message("marks", missing, extra),
                    location + ".marks",
                )
        for attr, predicate in rule.conditions.items():
            if isinstance(predicate, ExprPredicate) and names:
                unknown = sorted(expr_attrs(predicate.ast) - set(names))
                if unknown:
                    error(
                        "unknown_attribute",
                        f"expression references unknown indicator(s): {', '.join(unknown)}",
                        f"{location}.conditions.{attr}",
                    )

    _warn_overlaps(decoded, warning)
    _warn_gaps(decoded, names, warning)

    binding = doc.get("selection_binding")
    if isinstance(binding, dict) and names:
        kpis = binding.get("required_kpis", [])
        if isinstance(kpis, list):
            unknown = sorted(k for k in kpis if isinstance(k, str) and k not in names)
            if unknown:
                error(
                    "selection_kpis_unknown",
                    f"required_kpis name unknown indicator(s): {', '.join(unknown)}",
                    "selection_binding.required_kpis",
                )


def _key_mismatch_message(what: str, missing: list[str], extra: list[str]) -> str:
    parts = []
    if missing:
        parts.append(f"missing {', '.join(missing)}")
    if extra:
        parts.append(f"unexpected {', '.join(extra)}")
    return f"{what} keys must equal the indicator names ({'; '.join(parts)})"


def _ranges_intersect(a: RangePredicate, b: RangePredicate) -> bool:
    lo = max(a.min, b.min)
    hi = min(a.max, b.max)
    if lo < hi:
        return True
    if lo > hi:
        return False
    return _range_contains(a, lo) and _range_contains(b, lo)


def _range_contains(r: RangePredicate, point: Fraction) -> bool:
    low = r.min <= point if r.min_inclusive else r.min < point
    high = point <= r.max if r.max_inclusive else point < r.max
    return low and high


def _predicates_compatible(a, b) -> bool:
    """Can some value satisfy both predicates? Conservative for expressions."""
    if isinstance(a, ExprPredicate) or isinstance(b, ExprPredicate):
        return True
    if isinstance(a, RangePredicate) and isinstance(b, RangePredicate):
        return _ranges_intersect(a, b)
    if isinstance(a, EqualsPredicate) and isinstance(b, EqualsPredicate):
        return a.value == b.value
    values_a = _value_set(a)
    values_b = _value_set(b)
    if values_a is not None and values_b is not None:
        return bool(values_a & values_b)
    if values_a is not None:
        return any(_single_compatible(b, v) for v in values_a)
    if values_b is not None:
        return any(_single_compatible(a, v) for v in values_b)
    return True


def _value_set(p):
    if isinstance(p, EqualsPredicate):
        return {p.value}
    if isinstance(p, InSetPredicate):
        return set(p.values)
    return None


def _single_compatible(p, value) -> bool:
    if isinstance(p, RangePredicate):
        return isinstance(value, Fraction) and _range_contains(p, value)
    return True


def _warn_overlaps(decoded, warning):
    for i in range(len(decoded)):
        for j in range(i + 1, len(decoded)):
            loc_a, a = decoded[i]
            loc_b, b = decoded[j]
            if a.priority != b.priority:
                continue
            shared = set(a.conditions) & set(b.conditions)
            if not shared:
                continue
            if all(_predicates_compatible(a.conditions[k], b.conditions[k]) for k in shared):
                warning(
                    "overlapping_rules",
                    f"rules {a.rule_id} and {b.rule_id} share priority {a.priority} "
                    "and can match the same record; the tie breaks on the lower rule_id",
                    loc_b,
                )


def _warn_gaps(decoded, names, warning):
    for name in names:
        ranges = []
        for _, rule in decoded:
            predicate = rule.conditions.get(name)
            if not isinstance(predicate, RangePredicate):
                ranges = []
                break
            ranges.append(predicate)
        if len(ranges) < 2:
            continue
        ranges.sort(key=lambda r: (r.min, r.max))
        cursor = ranges[0]
        for nxt in ranges[1:]:
            gap = nxt.min > cursor.max or (
                nxt.min == cursor.max and not (cursor.max_inclusive or nxt.min_inclusive)
            )
            if gap:
                warning(
                    "range_gap",
                    f"no rule covers {name} between {decimal_text(cursor.max)} and {decimal_text(nxt.min)}",
                    "algorithm.mapper_rules",
                )
            if nxt.max > cursor.max:
                cursor = nxt


# ---------------------------------------------------------------------------
# Multi-applicant scorecard

def _validate_scorecard(algo: dict, doc: dict, error, warning):
    raw_params = algo.get("parameters")
    if not isinstance(raw_params, list) or not raw_params:
        error("empty_parameters", "parameters must be a non-empty array", "algorithm.parameters")
        return
    parameters = []
    seen: set[str] = set()
    for i, item in enumerate(raw_params):
        name = item.get("name") if isinstance(item, dict) else None
        location = (
            f"algorithm.parameters[{name}]" if isinstance(name, str) and name else f"algorithm.parameters[{i}]"
        )
        if isinstance(item, dict):
            raw_rules = item.get("mark_rules")
            if isinstance(raw_rules, list) and not raw_rules:
                error("empty_mark_rules", "mark_rules must not be empty", location + ".mark_rules")
                continue
        try:
            param = _decode_parameter(item, location)
        except ModelDecodeError as exc:
            if "mark_rules" in exc.location and "non-empty" in exc.message:
                code = "empty_mark_rules"
            elif "expression error" in exc.message:
                code = "expression_parse_error"
            elif "negative" in exc.message:
                code = "negative_weight"
            else:
                code = "invalid_parameter"
            error(code, exc.message, exc.location)
            continue
        if param.name in seen:
            error("duplicate_parameter", f"parameter {param.name!r} appears twice", location)
            continue
        seen.add(param.name)
        parameters.append((location, param))
        split = param.role_split
        if split.primary_pct + split.co_pct != 100:
            error(
                "role_split_sum",
                "primary_pct and co_pct must sum to exactly 100",
                location + ".role_split",
            )
        if not (0 <= split.primary_pct <= 100 and 0 <= split.co_pct <= 100):
            error(
                "role_split_range",
                "role split percentages must lie in 0..100",
                location + ".role_split",
            )

    names = {p.name for _, p in parameters}
    if parameters and all(p.weight == 0 for _, p in parameters):
        error("all_weights_zero", "every parameter weight is zero", "algorithm.parameters")
    for location, param in parameters:
        for i, rule in enumerate(param.mark_rules):
            if isinstance(rule.predicate, ExprPredicate):
                unknown = sorted(expr_attrs(rule.predicate.ast) - names)
                if unknown:
                    error(
                        "unknown_attribute",
                        f"expression references unknown parameter(s): {', '.join(unknown)}",
                        f"{location}.mark_rules[{i}]",
                    )

    binding = doc.get("selection_binding")
    if isinstance(binding, dict) and names:
        kpis = binding.get("required_kpis", [])
        if isinstance(kpis, list):
            unknown = sorted(k for k in kpis if isinstance(k, str) and k not in names)
            if unknown:
                error(
                    "selection_kpis_unknown",
                    f"required_kpis name unknown parameter(s): {', '.join(unknown)}",
                    "selection_binding.required_kpis",
                )
