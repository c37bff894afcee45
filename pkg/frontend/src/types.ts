// Shapes of the documents the scoring API exchanges. Decimal quantities
// travel as strings and must be displayed verbatim, never recomputed.

export type TaggedDecimal = { decimal: string };

export type AttributeValue = number | boolean | string | TaggedDecimal;

export interface RangePredicate {
  min?: string;
  max?: string;
  min_inclusive?: boolean;
  max_inclusive?: boolean;
}

export type Predicate =
  | { range: RangePredicate }
  | { equals: AttributeValue }
  | { in: AttributeValue[] }
  | { expr: string };

export interface Indicator {
  name: string;
  value_kind: "numeric" | "text";
  weight: string;
}

export interface MapperRule {
  rule_id: number;
  priority: number;
  conditions: Record<string, Predicate>;
  marks: Record<string, string>;
}

export interface WamAlgorithm {
  kind: "weighted_average_mapper";
  indicators: Indicator[];
  mapper_rules: MapperRule[];
}

export interface RoleSplit {
  primary_pct: string;
  co_pct: string;
}

export interface MarkRule {
  predicate: Predicate;
  mark: string;
}

export interface ScorecardParameter {
  name: string;
  weight: string;
  role_split: RoleSplit;
  mark_rules: MarkRule[];
}

export interface ScorecardAlgorithm {
  kind: "multi_applicant_scorecard";
  parameters: ScorecardParameter[];
}

export type Algorithm = WamAlgorithm | ScorecardAlgorithm;

export interface SelectionBinding {
  application_ids: string[];
  required_kpis: string[];
}

export interface ModelDocument {
  model_id: number;
  name: string;
  version: number;
  algorithm: Algorithm;
  selection_binding?: SelectionBinding;
  base_version?: number;
}

export interface ModelSummary {
  model_id: number;
  name: string;
  version: number;
  algorithm: string;
}

export interface ModelList {
  models: ModelSummary[];
  snapshot_version: number;
}

export interface PutResult {
  model_id: number;
  version: number;
  snapshot_version: number;
}

export interface Finding {
  severity: "error" | "warning";
  code: string;
  message: string;
  location: string;
}

export interface ValidateResult {
  findings: Finding[];
}

export interface ScoreRecord {
  record_id: string;
  attributes: Record<string, AttributeValue>;
}

export interface ScoreRequest {
  application_id: string;
  record: ScoreRecord;
  model_id?: number;
  kpi_list?: string[];
  co_record?: ScoreRecord;
}

export interface Contribution {
  indicator: string;
  value: string;
  mark: string;
  weight: string;
  weighted_term: string;
  share: string;
}

export interface SelectionInfo {
  model_id: number;
  fitness: string;
  rationale: string;
  bypassed: boolean;
}

export interface ScoreResult {
  record_id: string;
  model_id: number;
  model_version: number;
  computed_score: string;
  matched_rule_id: number | null;
  selection: SelectionInfo;
  contributions: Contribution[];
  enriched_record: ScoreRecord;
  rationale: string[];
}

export interface NearestMiss {
  rule_id: number;
  indicator: string;
  condition: string;
}
