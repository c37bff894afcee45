"""Deterministic model selection by eligibility and fitness.

A model is eligible when its required KPIs are all covered by the request's
KPI list or the record's attribute names. Fitness adds 2 for an application
binding match to the fraction of required KPIs in the KPI list, so it lies
in [0, 3]; ties break on the lowest model_id.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import MalformedRequest, NoEligibleModel
from .numeric import decimal_text
from .registry import RegistrySnapshot, get_model

MAX_FITNESS = Fraction(3)


@dataclass(frozen=True)
class SelectionRequest:
    application_id: str
    explicit_model_id: int | None = None
    provided_kpis: tuple[str, ...] = ()
    record_attribute_names: frozenset[str] = frozenset()


@dataclass(frozen=True)
class SelectionOutcome:
    model_id: int
    fitness: Fraction
    rationale: str
    bypassed: bool

    def to_doc(self) -> dict:
        return {
            "model_id": self.model_id,
            "fitness": decimal_text(self.fitness),
            "rationale": self.rationale,
            "bypassed": self.bypassed,
        }


def select_model(snapshot: RegistrySnapshot, request: SelectionRequest) -> SelectionOutcome:
    if not request.application_id:
        raise MalformedRequest("application_id must be a non-empty string")
    if request.explicit_model_id is not None:
        model = get_model(snapshot, request.explicit_model_id)
        return SelectionOutcome(
            model.model_id,
            MAX_FITNESS,
            f"explicit model {model.model_id} requested",
            True,
        )

    provided = set(request.provided_kpis)
    covered = provided | set(request.record_attribute_names)
    best: SelectionOutcome | None = None
    missing_per_model: dict[int, list[str]] = {}
    for model_id in sorted(snapshot.models):
        model = snapshot.models[model_id]
        binding = model.selection_binding
        required = set(binding.required_kpis)
        missing = sorted(required - covered)
        if missing:
            missing_per_model[model_id] = missing
            continue
        bound = request.application_id in binding.application_ids
        overlap = len(required & provided)
        coverage = Fraction(overlap, max(1, len(required)))
        fitness = (Fraction(2) if bound else Fraction(0)) + coverage
        rationale = (
            f"model {model_id} selected: fitness {decimal_text(fitness)} "
            f"(application binding {'matched' if bound else 'not matched'}, "
            f"KPI coverage {overlap}/{len(required)})"
        )
        # strict > keeps the lowest model_id on ties
        if best is None or fitness > best.fitness:
            best = SelectionOutcome(model_id, fitness, rationale, False)
    if best is None:
        raise NoEligibleModel(request.application_id, missing_per_model)
    return best
