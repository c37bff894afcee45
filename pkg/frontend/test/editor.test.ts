import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { ModelDraft } from "../src/draft.js";
import { renderBanner, renderEditor, type EditorHandlers } from "../src/render.js";
import { mockFetch, model1011, ROLE_SPLIT_FINDING, scorecard2044 } from "./helpers.js";

function handlers(overrides: Partial<EditorHandlers> = {}): EditorHandlers {
  return {
    onWeight: () => {},
    onRoleSplit: () => {},
    onExpr: () => {},
    onMark: () => {},
    onValidate: () => {},
    onSave: () => {},
    ...overrides,
  };
}

let root: HTMLElement;

beforeEach(() => {
  root = document.createElement("div");
  document.body.replaceChildren(root);
});

describe("model editor view", () => {
  it("shows the rule grid with range text and marks", () => {
    renderEditor(root, new ModelDraft(model1011()), handlers());

    const rangeCell = root.querySelector(
      '[data-loc="algorithm.mapper_rules[rule 105].conditions.CreditScore"]',
    );
    expect(rangeCell?.textContent).toContain("600 – 800 (incl.)");

    const markInputs = root.querySelectorAll<HTMLInputElement>("input.mark");
    expect([...markInputs].map((i) => i.value)).toEqual(["250", "160", "130", "146.5"]);

    const save = root.querySelector<HTMLButtonElement>("button.save");
    expect(save?.disabled).toBe(true);
  });

  it("renders expression predicates as editable text", () => {
    renderEditor(root, new ModelDraft(model1011()), handlers());
    const cell = root.querySelector(
      '[data-loc="algorithm.mapper_rules[rule 105].conditions.TotalBankSaving"]',
    );
    const input = cell?.querySelector<HTMLInputElement>("input.expr");
    expect(input?.value).toBe("TotalBankSaving BETWEEN 0 AND 50000");
  });

  it("pins the server's role_split finding to its cell and disables Save", async () => {
    const draft = new ModelDraft(scorecard2044());
    draft.setRoleSplit("ApplicantAge", "60", "30");
    const { fetch } = mockFetch({
      "POST /v1/models/validate": { status: 200, body: { findings: [ROLE_SPLIT_FINDING] } },
    });
    await draft.validate(new Client("http://api", fetch));

    renderEditor(root, draft, handlers());

    const splitCell = root.querySelector(
      '[data-loc="algorithm.parameters[ApplicantAge].role_split"]',
    );
    const finding = splitCell?.querySelector(".finding.error");
    expect(finding?.textContent).toContain("role_split_sum");
    expect(finding?.textContent).toContain("must sum to exactly 100");

    expect(root.querySelector<HTMLButtonElement>("button.save")?.disabled).toBe(true);
  });

  it("enables Save once the server returns no errors for a dirty draft", async () => {
    const draft = new ModelDraft(model1011());
    draft.setIndicatorWeight("CreditScore", "40");
    const { fetch } = mockFetch({
      "POST /v1/models/validate": { status: 200, body: { findings: [] } },
    });
    await draft.validate(new Client("http://api", fetch));

    const onSave = vi.fn();
    renderEditor(root, draft, handlers({ onSave }));

    const save = root.querySelector<HTMLButtonElement>("button.save");
    expect(save?.disabled).toBe(false);
    save?.click();
    expect(onSave).toHaveBeenCalledTimes(1);
  });

  it("routes weight edits and blur validation through the handlers", () => {
    const onWeight = vi.fn();
    const onValidate = vi.fn();
    renderEditor(root, new ModelDraft(model1011()), handlers({ onWeight, onValidate }));

    const weight = root.querySelector<HTMLInputElement>("input.weight");
    if (weight === null) throw new Error("weight input missing");
    weight.value = "40";
    weight.dispatchEvent(new Event("change"));
    weight.dispatchEvent(new Event("blur"));

    expect(onWeight).toHaveBeenCalledWith("CreditScore", "40");
    expect(onValidate).toHaveBeenCalledTimes(1);
  });

  it("lists findings with no matching cell in the general block", async () => {
    const draft = new ModelDraft(model1011());
    const { fetch } = mockFetch({
      "POST /v1/models/validate": {
        status: 200,
        body: {
          findings: [
            {
              severity: "error",
              code: "selection_kpis_unknown",
              message: "required KPI 'ShoeSize' is not an indicator",
              location: "selection_binding.required_kpis",
            },
          ],
        },
      },
    });
    await draft.validate(new Client("http://api", fetch));

    renderEditor(root, draft, handlers());
    const general = root.querySelector(".findings-general .finding.error");
    expect(general?.textContent).toContain("selection_kpis_unknown");
  });

  it("shows a dismissible banner for API errors", () => {
    renderBanner(root, new ApiError(500, "internal", "unexpected failure"));
    const banner = root.querySelector(".banner");
    expect(banner?.textContent).toContain("internal");

    banner?.querySelector<HTMLButtonElement>("button.dismiss")?.click();
    expect(root.querySelector(".banner")).toBeNull();
  });
});
