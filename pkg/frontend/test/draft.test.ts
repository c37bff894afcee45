import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { isWam, ModelDraft } from "../src/draft.js";
import { mockFetch, model1011, ROLE_SPLIT_FINDING, scorecard2044 } from "./helpers.js";

describe("ModelDraft", () => {
  it("cannot save a freshly loaded document", () => {
    const draft = new ModelDraft(model1011());
    expect(draft.dirty).toBe(false);
    expect(draft.canSave).toBe(false);
  });

  it("cannot save a blank template", () => {
    expect(ModelDraft.blank().canSave).toBe(false);
  });

  it("saves an edited weight with the version it was loaded at", async () => {
    const draft = new ModelDraft(model1011());
    draft.setIndicatorWeight("CreditScore", "40");
    expect(draft.dirty).toBe(true);

    const { fetch, calls } = mockFetch({
      "POST /v1/models/validate": { status: 200, body: { findings: [] } },
      "PUT /v1/models/1011": (body) => {
        const doc = body as { base_version: number; algorithm: { indicators: { weight: string }[] } };
        expect(doc.base_version).toBe(3);
        expect(doc.algorithm.indicators[0]?.weight).toBe("40");
        return { status: 200, body: { model_id: 1011, version: 4, snapshot_version: 2 } };
      },
    });
    const client = new Client("http://api", fetch);

    await draft.validate(client);
    expect(draft.canSave).toBe(true);

    const put = await draft.save(client);
    expect(put.version).toBe(4);
    expect(draft.doc.version).toBe(4);
    expect(draft.dirty).toBe(false);
    expect(draft.canSave).toBe(false);
    expect(calls.map((c) => c.method)).toEqual(["POST", "PUT"]);
  });

  it("gates save on the server's error findings", async () => {
    const draft = new ModelDraft(scorecard2044());
    draft.setRoleSplit("ApplicantAge", "60", "30");

    const { fetch } = mockFetch({
      "POST /v1/models/validate": { status: 200, body: { findings: [ROLE_SPLIT_FINDING] } },
    });
    await draft.validate(new Client("http://api", fetch));

    expect(draft.dirty).toBe(true);
    expect(draft.errors.map((f) => f.code)).toEqual(["role_split_sum"]);
    expect(draft.canSave).toBe(false);
  });

  it("does not let warnings block save", async () => {
    const draft = new ModelDraft(model1011());
    draft.setIndicatorWeight("CreditScore", "40");

    const { fetch } = mockFetch({
      "POST /v1/models/validate": {
        status: 200,
        body: {
          findings: [
            {
              severity: "warning",
              code: "overlapping_rules",
              message: "rules 105 and 106 overlap",
              location: "algorithm.mapper_rules[rule 106]",
            },
          ],
        },
      },
    });
    await draft.validate(new Client("http://api", fetch));

    expect(draft.errors).toEqual([]);
    expect(draft.canSave).toBe(true);
  });

  it("flags a version conflict as needing reload", async () => {
    const draft = new ModelDraft(model1011());
    draft.setIndicatorWeight("CreditScore", "40");
    draft.lastFindings = [];

    const { fetch } = mockFetch({
      "PUT /v1/models/1011": {
        status: 409,
        body: {
          code: "validation_rejected",
          message: "model 1011 is at version 5, not 3",
          details: {
            findings: [
              {
                severity: "error",
                code: "version_conflict",
                message: "stored version is 5, request was based on 3",
                location: "base_version",
              },
            ],
          },
        },
      },
    });
    const client = new Client("http://api", fetch);

    await expect(draft.save(client)).rejects.toMatchObject({ status: 409 });
    expect(draft.needsReload).toBe(true);
    expect(draft.canSave).toBe(false);
  });

  it("keeps decimal strings verbatim through edits", () => {
    const draft = new ModelDraft(model1011());
    draft.setIndicatorWeight("CreditScore", "40");
    if (!isWam(draft.doc.algorithm)) throw new Error("wrong kind");
    expect(draft.doc.algorithm.mapper_rules[0]?.marks["TotalBankSaving"]).toBe("146.5");
    expect(draft.doc.algorithm.indicators[1]?.weight).toBe("15");
  });

  it("surfaces API errors from validate untouched", async () => {
    const draft = new ModelDraft(model1011());
    const { fetch } = mockFetch({
      "POST /v1/models/validate": {
        status: 400,
        body: { code: "malformed_request", message: "document must be a JSON object" },
      },
    });
    await expect(draft.validate(new Client("http://api", fetch))).rejects.toBeInstanceOf(ApiError);
  });
});
