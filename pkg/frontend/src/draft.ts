import { ApiError, type Client } from "./api.js";
import type {
  Algorithm,
  Finding,
  ModelDocument,
  PutResult,
  ScorecardAlgorithm,
  WamAlgorithm,
} from "./types.js";

export function isWam(algorithm: Algorithm): algorithm is WamAlgorithm {
  return algorithm.kind === "weighted_average_mapper";
}

export function isScorecard(algorithm: Algorithm): algorithm is ScorecardAlgorithm {
  return algorithm.kind === "multi_applicant_scorecard";
}

// Editor state for one model document. The draft never judges its own
// contents: findings come from the validate endpoint, and Save stays
// disabled until the server has seen the current draft and found no errors.
export class ModelDraft {
  doc: ModelDocument;
  dirty = false;
  lastFindings: Finding[] = [];
  needsReload = false;
  private loadedVersion: number;

  constructor(doc: ModelDocument) {
    this.doc = doc;
    this.loadedVersion = doc.version ?? 0;
  }

  static blank(): ModelDraft {
    return new ModelDraft({
      model_id: 0,
      name: "",
      version: 0,
      algorithm: { kind: "weighted_average_mapper", indicators: [], mapper_rules: [] },
    });
  }

  get errors(): Finding[] {
    return this.lastFindings.filter((f) => f.severity === "error");
  }

  get canSave(): boolean {
    return this.dirty && !this.needsReload && this.errors.length === 0;
  }

  edit(mutate: (doc: ModelDocument) => void): void {
    mutate(this.doc);
    this.dirty = true;
  }

  setIndicatorWeight(name: string, weight: string): void {
    this.edit((doc) => {
      if (isWam(doc.algorithm)) {
        const indicator = doc.algorithm.indicators.find((i) => i.name === name);
        if (indicator) indicator.weight = weight;
      } else {
        const parameter = doc.algorithm.parameters.find((p) => p.name === name);
        if (parameter) parameter.weight = weight;
      }
    });
  }

  setRoleSplit(parameterName: string, primaryPct: string, coPct: string): void {
    this.edit((doc) => {
      if (!isScorecard(doc.algorithm)) return;
      const parameter = doc.algorithm.parameters.find((p) => p.name === parameterName);
      if (parameter) {
        parameter.role_split = { primary_pct: primaryPct, co_pct: coPct };
      }
    });
  }

  setConditionExpr(ruleId: number, indicator: string, expr: string): void {
    this.edit((doc) => {
      if (!isWam(doc.algorithm)) return;
      const rule = doc.algorithm.mapper_rules.find((r) => r.rule_id === ruleId);
      if (rule) rule.conditions[indicator] = { expr };
    });
  }

  setMark(ruleId: number, indicator: string, mark: string): void {
    this.edit((doc) => {
      if (!isWam(doc.algorithm)) return;
      const rule = doc.algorithm.mapper_rules.find((r) => r.rule_id === ruleId);
      if (rule) rule.marks[indicator] = mark;
    });
  }

  async validate(client: Client): Promise<Finding[]> {
    const res = await client.validateModel(this.doc);
    this.lastFindings = res.findings;
    return this.lastFindings;
  }

  // PUT carries the version this draft was loaded at; a 409 means someone
  // else saved first and this draft must be reloaded, not retried.
  async save(client: Client): Promise<PutResult> {
    const body = { ...this.doc, base_version: this.loadedVersion };
    try {
      const put = await client.putModel(this.doc.model_id, body);
      this.doc.version = put.version;
      this.loadedVersion = put.version;
      this.dirty = false;
      return put;
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.needsReload = true;
      }
      throw err;
    }
  }
}
