from __future__ import annotations

import copy

from conftest import model_1011_doc, scorecard_doc
from scoremill import has_errors, validate_document


def wam_doc(indicators, rules):
    return {
        "model_id": 7,
        "name": "probe",
        "version": 1,
        "algorithm": {
            "kind": "weighted_average_mapper",
            "indicators": indicators,
            "mapper_rules": rules,
        },
    }


def one_indicator_doc(ranges):
    """One numeric indicator K; one rule per (min, max, min_inc, max_inc)."""
    rules = []
    for i, (lo, hi, lo_inc, hi_inc) in enumerate(ranges):
        rules.append(
            {
                "rule_id": 10 + i,
                "priority": i,  # distinct priorities keep overlap warnings out
                "conditions": {
                    "K": {
                        "range": {
                            "min": str(lo),
                            "max": str(hi),
                            "min_inclusive": lo_inc,
                            "max_inclusive": hi_inc,
                        }
                    }
                },
                "marks": {"K": "1"},
            }
        )
    return wam_doc([{"name": "K", "value_kind": "numeric", "weight": "1"}], rules)


def codes(findings):
    return [f.code for f in findings]


def test_golden_documents_are_clean():
    assert validate_document(model_1011_doc()) == []
    assert validate_document(scorecard_doc()) == []


def test_findings_sorted_by_location_then_code():
    doc = model_1011_doc()
    doc["model_id"] = 0
    doc["name"] = ""
    doc["algorithm"]["indicators"][0]["weight"] = "-1"
    findings = validate_document(doc)
    keys = [(f.location, f.code) for f in findings]
    assert keys == sorted(keys)
    assert has_errors(findings)


def test_unknown_algorithm_kind():
    doc = model_1011_doc()
    doc["algorithm"]["kind"] = "mystery"
    findings = validate_document(doc)
    assert codes(findings) == ["unknown_algorithm_kind"]
    assert findings[0].location == "algorithm.kind"


def test_empty_indicators_and_zero_weights():
    doc = wam_doc([], [])
    assert codes(validate_document(doc)) == ["empty_indicators"]

    doc = wam_doc(
        [
            {"name": "A", "value_kind": "numeric", "weight": "0"},
            {"name": "B", "value_kind": "numeric", "weight": "0"},
        ],
        [],
    )
    assert "all_weights_zero" in codes(validate_document(doc))


def test_negative_weight_and_duplicate_indicator():
    doc = wam_doc(
        [
            {"name": "A", "value_kind": "numeric", "weight": "-2"},
            {"name": "B", "value_kind": "numeric", "weight": "1"},
            {"name": "B", "value_kind": "numeric", "weight": "1"},
        ],
        [],
    )
    findings = validate_document(doc)
    assert "negative_weight" in codes(findings)
    dup = next(f for f in findings if f.code == "duplicate_indicator")
    assert dup.location == "algorithm.indicators[2]"
    assert "'B'" in dup.message


def test_duplicate_rule_id():
    doc = model_1011_doc()
    doc["algorithm"]["mapper_rules"].append(copy.deepcopy(doc["algorithm"]["mapper_rules"][0]))
    findings = validate_document(doc)
    dups = [f for f in findings if f.code == "duplicate_rule_id"]
    assert len(dups) == 1
    assert dups[0].location == "algorithm.mapper_rules[rule 105]"


def test_conditions_and_marks_keys_mismatch():
    doc = model_1011_doc()
    rule = doc["algorithm"]["mapper_rules"][0]
    del rule["conditions"]["CreditScore"]
    rule["conditions"]["Mystery"] = {"equals": 1}
    del rule["marks"]["MonthlySalary"]
    findings = validate_document(doc)
    cond = next(f for f in findings if f.code == "conditions_keys_mismatch")
    assert "missing CreditScore" in cond.message
    assert "unexpected Mystery" in cond.message
    assert cond.location == "algorithm.mapper_rules[rule 105].conditions"
    marks = next(f for f in findings if f.code == "marks_keys_mismatch")
    assert "missing MonthlySalary" in marks.message


def test_expression_parse_error_carries_rule_location():
    doc = model_1011_doc()
    doc["algorithm"]["mapper_rules"][0]["conditions"]["TotalBankSaving"] = {
        "expr": "TotalBankSaving BETWEEN 0 AND"
    }
    findings = validate_document(doc)
    parse = next(f for f in findings if f.code == "expression_parse_error")
    assert "rule 105" in parse.location


def test_unknown_attribute_in_expression():
    doc = model_1011_doc()
    doc["algorithm"]["mapper_rules"][0]["conditions"]["TotalBankSaving"] = {
        "expr": "TotalBankSaving >= 0 AND NetWorth >= 0"
    }
    findings = validate_document(doc)
    unknown = next(f for f in findings if f.code == "unknown_attribute")
    assert "NetWorth" in unknown.message
    assert unknown.location == "algorithm.mapper_rules[rule 105].conditions.TotalBankSaving"


def test_selection_kpis_unknown():
    doc = model_1011_doc()
    doc["selection_binding"]["required_kpis"].append("ShoeSize")
    findings = validate_document(doc)
    assert codes(findings) == ["selection_kpis_unknown"]
    assert findings[0].location == "selection_binding.required_kpis"
    assert "ShoeSize" in findings[0].message


def test_overlapping_rules_warning():
    doc = model_1011_doc()
    second = copy.deepcopy(doc["algorithm"]["mapper_rules"][0])
    second["rule_id"] = 106
    second["conditions"]["CreditScore"] = {"range": {"min": "700", "max": "900"}}
    doc["algorithm"]["mapper_rules"].append(second)
    findings = validate_document(doc)
    assert codes(findings) == ["overlapping_rules"]
    warn = findings[0]
    assert warn.severity == "warning"
    assert "105 and 106" in warn.message
    assert warn.location == "algorithm.mapper_rules[rule 106]"
    assert not has_errors(findings)


def test_disjoint_or_different_priority_rules_do_not_warn():
    doc = model_1011_doc()
    second = copy.deepcopy(doc["algorithm"]["mapper_rules"][0])
    second["rule_id"] = 106
    second["conditions"]["CreditScore"] = {"range": {"min": "801", "max": "900"}}
    doc["algorithm"]["mapper_rules"].append(second)
    # the 800..801 hole is a gap, not an overlap
    assert codes(validate_document(doc)) == ["range_gap"]

    overlapping = copy.deepcopy(model_1011_doc())
    third = copy.deepcopy(overlapping["algorithm"]["mapper_rules"][0])
    third["rule_id"] = 106
    third["priority"] = 1
    overlapping["algorithm"]["mapper_rules"].append(third)
    assert validate_document(overlapping) == []


def test_overlap_respects_boundary_inclusivity():
    # [0,10] and [10,20] share only the point 10; both ends inclusive -> overlap
    touching = one_indicator_doc([(0, 10, True, True), (10, 20, True, True)])
    for rule in touching["algorithm"]["mapper_rules"]:
        rule["priority"] = 0
    assert codes(validate_document(touching)) == ["overlapping_rules"]

    # exclusive on one side at the shared point -> no common value
    apart = one_indicator_doc([(0, 10, True, False), (10, 20, True, True)])
    for rule in apart["algorithm"]["mapper_rules"]:
        rule["priority"] = 0
    assert validate_document(apart) == []


def test_range_gap_warning_internal_only():
    gapped = one_indicator_doc([(0, 10, True, True), (20, 30, True, True)])
    findings = validate_document(gapped)
    assert codes(findings) == ["range_gap"]
    assert "between 10 and 20" in findings[0].message
    assert "K" in findings[0].message

    # adjacent ranges with a shared covered endpoint leave no gap, and the
    # uncovered space outside [0, 30] is not reported
    adjacent = one_indicator_doc([(0, 10, True, True), (10, 30, False, True)])
    assert validate_document(adjacent) == []

    # both ends exclusive at the meeting point leaves the point uncovered
    pinhole = one_indicator_doc([(0, 10, True, False), (10, 30, False, True)])
    assert codes(validate_document(pinhole)) == ["range_gap"]


def test_range_gap_needs_all_range_conditions():
    doc = one_indicator_doc([(0, 10, True, True), (20, 30, True, True)])
    doc["algorithm"]["mapper_rules"][1]["conditions"]["K"] = {"expr": "K >= 20 AND K <= 30"}
    assert validate_document(doc) == []


# ---------------------------------------------------------------------------
# Scorecard checks

def test_role_split_sum_error():
    doc = scorecard_doc()
    doc["algorithm"]["parameters"][0]["role_split"] = {"primary_pct": "60", "co_pct": "30"}
    findings = validate_document(doc)
    assert codes(findings) == ["role_split_sum"]
    assert findings[0].location == "algorithm.parameters[ApplicantAge].role_split"
    assert findings[0].severity == "error"


def test_role_split_range_error():
    doc = scorecard_doc()
    doc["algorithm"]["parameters"][0]["role_split"] = {"primary_pct": "120", "co_pct": "-20"}
    findings = validate_document(doc)
    assert codes(findings) == ["role_split_range"]


def test_empty_parameters_and_mark_rules():
    doc = scorecard_doc()
    doc["algorithm"]["parameters"] = []
    assert codes(validate_document(doc)) == ["empty_parameters"]

    doc = scorecard_doc()
    doc["algorithm"]["parameters"][1]["mark_rules"] = []
    findings = validate_document(doc)
    # the dropped parameter also breaks the binding's KPI reference
    assert codes(findings) == ["empty_mark_rules", "selection_kpis_unknown"]
    assert findings[0].location == "algorithm.parameters[EmploymentField].mark_rules"


def test_duplicate_parameter():
    doc = scorecard_doc()
    doc["algorithm"]["parameters"].append(copy.deepcopy(doc["algorithm"]["parameters"][0]))
    findings = validate_document(doc)
    assert codes(findings) == ["duplicate_parameter"]


def test_scorecard_unknown_attribute_and_kpis():
    doc = scorecard_doc()
    doc["algorithm"]["parameters"][0]["mark_rules"][2]["predicate"] = {"expr": "Glitch > 45"}
    doc["selection_binding"]["required_kpis"] = ["ApplicantAge", "Missing"]
    findings = validate_document(doc)
    assert codes(findings) == ["unknown_attribute", "selection_kpis_unknown"]
    assert "Glitch" in findings[0].message
    assert findings[0].location == "algorithm.parameters[ApplicantAge].mark_rules[2]"


def test_scorecard_all_weights_zero():
    doc = scorecard_doc()
    for param in doc["algorithm"]["parameters"]:
        param["weight"] = "0"
    assert codes(validate_document(doc)) == ["all_weights_zero"]


def test_non_object_document():
    findings = validate_document(["not", "a", "model"])
    assert codes(findings) == ["invalid_document"]
