import type { FetchLike } from "../src/api.js";
import type { ModelDocument } from "../src/types.js";

// Mirrors the fixture model the API serves, decimal strings and all.
export function model1011(): ModelDocument {
  return {
    model_id: 1011,
    name: "consumer-lending-wavg",
    version: 3,
    algorithm: {
      kind: "weighted_average_mapper",
      indicators: [
        { name: "CreditScore", value_kind: "numeric", weight: "20" },
        { name: "MonthlySalary", value_kind: "numeric", weight: "15" },
        { name: "EducationLevel", value_kind: "text", weight: "15" },
        { name: "TotalBankSaving", value_kind: "numeric", weight: "10" },
      ],
      mapper_rules: [
        {
          rule_id: 105,
          priority: 0,
          conditions: {
            CreditScore: {
              range: { min: "600", max: "800", min_inclusive: true, max_inclusive: true },
            },
            MonthlySalary: {
              range: { min: "0", max: "50000", min_inclusive: true, max_inclusive: true },
            },
            EducationLevel: { equals: "Bachelor" },
            TotalBankSaving: { expr: "TotalBankSaving BETWEEN 0 AND 50000" },
          },
          marks: {
            CreditScore: "250",
            MonthlySalary: "160",
            EducationLevel: "130",
            TotalBankSaving: "146.5",
          },
        },
      ],
    },
    selection_binding: {
      application_ids: ["LENDING-01"],
      required_kpis: ["CreditScore", "MonthlySalary", "EducationLevel", "TotalBankSaving"],
    },
  };
}

export function scorecard2044(): ModelDocument {
  return {
    model_id: 2044,
    name: "joint-application-scorecard",
    version: 1,
    algorithm: {
      kind: "multi_applicant_scorecard",
      parameters: [
        {
          name: "ApplicantAge",
          weight: "10",
          role_split: { primary_pct: "65", co_pct: "35" },
          mark_rules: [
            { predicate: { range: { min: "18", max: "29" } }, mark: "40" },
            { predicate: { range: { min: "30", max: "45" } }, mark: "80" },
            { predicate: { expr: "ApplicantAge > 45" }, mark: "60" },
          ],
        },
        {
          name: "EmploymentField",
          weight: "15",
          role_split: { primary_pct: "50", co_pct: "50" },
          mark_rules: [
            { predicate: { in: ["Business", "Accountant"] }, mark: "90" },
            { predicate: { expr: "EmploymentField != ''" }, mark: "50" },
          ],
        },
      ],
    },
    selection_binding: {
      application_ids: ["JOINT-01"],
      required_kpis: ["ApplicantAge", "EmploymentField"],
    },
  };
}

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

export interface Reply {
  status: number;
  body?: unknown;
}

// fetch double: routes "<METHOD> <path>" to a canned or computed reply
// and records every call so tests can assert what went over the wire.
export function mockFetch(
  routes: Record<string, Reply | ((body: unknown) => Reply)>,
): { fetch: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchFn: FetchLike = (input, init = {}) => {
    const method = init.method ?? "GET";
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    const body = typeof init.body === "string" ? JSON.parse(init.body) : undefined;
    calls.push({ method, path, body });
    const route = routes[`${method} ${path}`];
    if (route === undefined) {
      throw new Error(`unexpected request: ${method} ${path}`);
    }
    const reply = typeof route === "function" ? route(body) : route;
    const response = {
      status: reply.status,
      ok: reply.status >= 200 && reply.status < 300,
      json: () =>
        reply.body === undefined
          ? Promise.reject(new Error("no body"))
          : Promise.resolve(reply.body),
    };
    return Promise.resolve(response as unknown as Response);
  };
  return { fetch: fetchFn, calls };
}

export const ROLE_SPLIT_FINDING = {
  severity: "error" as const,
  code: "role_split_sum",
  message: "primary_pct and co_pct must sum to exactly 100",
  location: "algorithm.parameters[ApplicantAge].role_split",
};
