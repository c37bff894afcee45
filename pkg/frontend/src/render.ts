import type { ApiError } from "./api.js";
import { isWam, type ModelDraft } from "./draft.js";
import type {
  Contribution,
  Finding,
  NearestMiss,
  Predicate,
  ScoreResult,
} from "./types.js";
import type { WhatIfEntry, WhatIfSession } from "./whatif.js";

type Attrs = Record<string, string | boolean>;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Attrs = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
    } else {
      node.setAttribute(key, value);
    }
  }
  node.append(...children);
  return node;
}

export function formatPredicate(pred: Predicate): string {
  if ("range" in pred) {
    const { min, max, min_inclusive = true, max_inclusive = true } = pred.range;
    if (min !== undefined && max !== undefined) {
      if (min_inclusive && max_inclusive) return `${min} – ${max} (incl.)`;
      return `${min_inclusive ? "[" : "("}${min}, ${max}${max_inclusive ? "]" : ")"}`;
    }
    if (min !== undefined) return `${min_inclusive ? "≥" : ">"} ${min}`;
    if (max !== undefined) return `${max_inclusive ? "≤" : "<"} ${max}`;
    return "any";
  }
  if ("equals" in pred) return `= ${displayValue(pred.equals)}`;
  if ("in" in pred) return `in (${pred.in.map(displayValue).join(", ")})`;
  return pred.expr;
}

function displayValue(value: unknown): string {
  if (value !== null && typeof value === "object" && "decimal" in (value as object)) {
    return (value as { decimal: string }).decimal;
  }
  return String(value);
}

// Pins each finding to the most specific editor cell whose location key
// prefixes it; anything unclaimed lands in the general findings block.
export function assignFindings(
  findings: Finding[],
  locationKeys: string[],
): { byKey: Map<string, Finding[]>; rest: Finding[] } {
  const keys = [...locationKeys].sort((a, b) => b.length - a.length);
  const byKey = new Map<string, Finding[]>();
  const rest: Finding[] = [];
  for (const finding of findings) {
    const key = keys.find((k) => finding.location === k || finding.location.startsWith(`${k}.`));
    if (key === undefined) {
      rest.push(finding);
    } else {
      const bucket = byKey.get(key) ?? [];
      bucket.push(finding);
      byKey.set(key, bucket);
    }
  }
  return { byKey, rest };
}

function findingNode(finding: Finding): HTMLElement {
  return el(
    "div",
    { class: `finding ${finding.severity}` },
    el("span", { class: "finding-code" }, finding.code),
    ` ${finding.message}`,
  );
}

export interface EditorHandlers {
  onWeight(name: string, value: string): void;
  onRoleSplit(parameterName: string, primaryPct: string, coPct: string): void;
  onExpr(ruleId: number, indicator: string, text: string): void;
  onMark(ruleId: number, indicator: string, text: string): void;
  onValidate(): void;
  onSave(): void;
}

function cell(locKey: string, findings: Map<string, Finding[]>, ...content: (Node | string)[]): HTMLElement {
  const td = el("td", { "data-loc": locKey }, ...content);
  for (const finding of findings.get(locKey) ?? []) td.append(findingNode(finding));
  return td;
}

function textInput(value: string, cls: string, onCommit: (text: string) => void): HTMLInputElement {
  const input = el("input", { type: "text", class: cls }) as HTMLInputElement;
  input.value = value;
  input.addEventListener("change", () => onCommit(input.value));
  return input;
}

export function renderEditor(root: HTMLElement, draft: ModelDraft, handlers: EditorHandlers): void {
  root.replaceChildren();
  const doc = draft.doc;
  const locationKeys: string[] = [];

  if (isWam(doc.algorithm)) {
    doc.algorithm.indicators.forEach((_, i) => locationKeys.push(`algorithm.indicators[${i}]`));
    for (const rule of doc.algorithm.mapper_rules) {
      const ruleKey = `algorithm.mapper_rules[rule ${rule.rule_id}]`;
      locationKeys.push(ruleKey);
      for (const name of Object.keys(rule.conditions)) {
        locationKeys.push(`${ruleKey}.conditions.${name}`);
      }
    }
  } else {
    doc.algorithm.parameters.forEach((p, i) => {
      locationKeys.push(`algorithm.parameters[${i}]`);
      locationKeys.push(`algorithm.parameters[${p.name}]`);
      locationKeys.push(`algorithm.parameters[${p.name}].role_split`);
      locationKeys.push(`algorithm.parameters[${p.name}].mark_rules`);
    });
  }

  const { byKey, rest } = assignFindings(draft.lastFindings, locationKeys);

  root.append(
    el(
      "div",
      { class: "editor-head" },
      el("h2", {}, doc.name || "(unnamed model)"),
      el("span", { class: "muted" }, `model ${doc.model_id} · version ${doc.version}`),
    ),
  );

  if (isWam(doc.algorithm)) {
    const indicators = doc.algorithm.indicators;

    const weightRows = indicators.map((indicator, i) => {
      const input = textInput(indicator.weight, "weight", (text) => handlers.onWeight(indicator.name, text));
      input.addEventListener("blur", () => handlers.onValidate());
      return el(
        "tr",
        {},
        el("td", {}, indicator.name),
        el("td", {}, indicator.value_kind),
        cell(`algorithm.indicators[${i}]`, byKey, input),
      );
    });
    root.append(
      el(
        "table",
        { class: "weights" },
        el("thead", {}, el("tr", {}, el("th", {}, "indicator"), el("th", {}, "kind"), el("th", {}, "weight"))),
        el("tbody", {}, ...weightRows),
      ),
    );

    const header = el("tr", {}, el("th", {}, "rule"), el("th", {}, "priority"));
    for (const indicator of indicators) {
      header.append(el("th", {}, indicator.name), el("th", {}, `${indicator.name} mark`));
    }
    const ruleRows = doc.algorithm.mapper_rules.map((rule) => {
      const ruleKey = `algorithm.mapper_rules[rule ${rule.rule_id}]`;
      const row = el(
        "tr",
        { "data-rule": String(rule.rule_id) },
        cell(ruleKey, byKey, String(rule.rule_id)),
        el("td", {}, String(rule.priority)),
      );
      for (const indicator of indicators) {
        const pred = rule.conditions[indicator.name];
        const condKey = `${ruleKey}.conditions.${indicator.name}`;
        if (pred === undefined) {
          row.append(cell(condKey, byKey, el("span", { class: "muted" }, "—")));
        } else if ("expr" in pred) {
          // only expression predicates are edited as text; structured
          // predicates stay read-only so their exactness survives
          const input = textInput(pred.expr, "expr", (text) => handlers.onExpr(rule.rule_id, indicator.name, text));
          input.addEventListener("blur", () => handlers.onValidate());
          row.append(cell(condKey, byKey, input));
        } else {
          row.append(cell(condKey, byKey, el("span", { class: "pred" }, formatPredicate(pred))));
        }
        const mark = rule.marks[indicator.name];
        const markInput = textInput(mark ?? "", "mark", (text) => handlers.onMark(rule.rule_id, indicator.name, text));
        markInput.addEventListener("blur", () => handlers.onValidate());
        row.append(el("td", {}, markInput));
      }
      return row;
    });
    root.append(
      el("table", { class: "rules" }, el("thead", {}, header), el("tbody", {}, ...ruleRows)),
    );
  } else {
    const paramRows = doc.algorithm.parameters.map((parameter, i) => {
      const weightInput = textInput(parameter.weight, "weight", (text) => handlers.onWeight(parameter.name, text));
      weightInput.addEventListener("blur", () => handlers.onValidate());

      const primary = textInput(parameter.role_split.primary_pct, "split", (text) =>
        handlers.onRoleSplit(parameter.name, text, parameter.role_split.co_pct),
      );
      const co = textInput(parameter.role_split.co_pct, "split", (text) =>
        handlers.onRoleSplit(parameter.name, parameter.role_split.primary_pct, text),
      );
      primary.addEventListener("blur", () => handlers.onValidate());
      co.addEventListener("blur", () => handlers.onValidate());
      const splitCell = cell(
        `algorithm.parameters[${parameter.name}].role_split`,
        byKey,
        primary,
        " / ",
        co,
      );

      const ruleList = el(
        "ul",
        { class: "mark-rules" },
        ...parameter.mark_rules.map((rule) =>
          el("li", {}, `${formatPredicate(rule.predicate)} → ${rule.mark}`),
        ),
      );
      return el(
        "tr",
        {},
        cell(`algorithm.parameters[${parameter.name}]`, byKey, parameter.name),
        el("td", {}, weightInput),
        splitCell,
        cell(`algorithm.parameters[${parameter.name}].mark_rules`, byKey, ruleList),
      );
    });
    root.append(
      el(
        "table",
        { class: "parameters" },
        el(
          "thead",
          {},
          el(
            "tr",
            {},
            el("th", {}, "parameter"),
            el("th", {}, "weight"),
            el("th", {}, "primary / co split"),
            el("th", {}, "mark rules"),
          ),
        ),
        el("tbody", {}, ...paramRows),
      ),
    );
  }

  if (rest.length > 0) {
    root.append(el("div", { class: "findings-general" }, ...rest.map(findingNode)));
  }

  const save = el("button", { class: "save", disabled: !draft.canSave }, "Save") as HTMLButtonElement;
  save.addEventListener("click", () => handlers.onSave());
  const status = draft.needsReload
    ? el("span", { class: "stale" }, "saved elsewhere; reload this model")
    : el("span", { class: "muted" }, draft.dirty ? "unsaved changes" : "saved");
  root.append(el("div", { class: "editor-foot" }, save, status));
}

export function renderBanner(root: HTMLElement, error: ApiError): void {
  const banner = el(
    "div",
    { class: "banner", role: "alert" },
    el("span", { class: "banner-code" }, error.code),
    ` ${error.message}`,
  );
  const dismiss = el("button", { class: "dismiss" }, "×");
  dismiss.addEventListener("click", () => banner.remove());
  banner.append(dismiss);
  root.append(banner);
}

// Bars are scaled by the stylesheet from the share string itself; the
// console does no arithmetic on any value it shows.
function contributionRow(contribution: Contribution): HTMLElement {
  const bar = el("div", { class: "bar" });
  bar.style.setProperty("--share", contribution.share);
  return el(
    "div",
    { class: "contribution" },
    el("span", { class: "contribution-name" }, contribution.indicator),
    el("span", { class: "contribution-mark" }, `mark ${contribution.mark} · weight ${contribution.weight}`),
    el("div", { class: "bar-track" }, bar),
    el("span", { class: "contribution-share" }, contribution.share),
  );
}

export function renderScoreResult(root: HTMLElement, result: ScoreResult): void {
  root.replaceChildren();
  root.append(
    el(
      "div",
      { class: "score-head" },
      el("span", { class: "score", "data-role": "score" }, result.computed_score),
      el(
        "span",
        { class: "muted" },
        `model ${result.model_id} v${result.model_version}` +
          (result.matched_rule_id === null ? "" : ` · rule ${result.matched_rule_id}`),
      ),
    ),
    el("div", { class: "selection-line" }, result.selection.rationale),
  );
  const sorted = [...result.contributions].sort(
    // ordering only; displayed text stays the API's exact string
    (a, b) => Number.parseFloat(b.share) - Number.parseFloat(a.share),
  );
  root.append(el("div", { class: "contributions" }, ...sorted.map(contributionRow)));
  for (const line of result.rationale) {
    root.append(el("div", { class: "rationale-line" }, line));
  }
}

export function renderErrorResult(root: HTMLElement, error: ApiError): void {
  root.replaceChildren();
  root.append(
    el("div", { class: "score-error" }, el("span", { class: "banner-code" }, error.code), ` ${error.message}`),
  );
  const misses = error.details["nearest_misses"];
  if (Array.isArray(misses)) {
    for (const miss of misses as NearestMiss[]) {
      root.append(
        el(
          "div",
          { class: "nearest-miss" },
          `${miss.indicator} failed rule ${miss.rule_id} (${miss.condition})`,
        ),
      );
    }
  }
}

export function renderHistory(
  root: HTMLElement,
  session: WhatIfSession,
  onRerun: (entry: WhatIfEntry) => void,
): void {
  root.replaceChildren();
  if (session.history.length === 0) return;
  const items = [...session.history].reverse().map((entry) => {
    const summary = entry.result
      ? `score ${entry.result.computed_score}`
      : `${entry.error?.code ?? "error"}`;
    const inputs = Object.entries(entry.inputs)
      .map(([k, v]) => `${k}=${v}`)
      .join(", ");
    const rerun = el("button", { class: "rerun" }, "re-run");
    rerun.addEventListener("click", () => onRerun(entry));
    return el(
      "li",
      {},
      el("span", { class: "history-summary" }, summary),
      el("span", { class: "muted" }, ` ${inputs} `),
      rerun,
    );
  });
  root.append(el("h3", {}, "history"), el("ul", { class: "history" }, ...items));
}
