import { ApiError, type Client } from "./api.js";
import type { AttributeValue, ScoreRequest, ScoreResult } from "./types.js";
import { parseAttributeInput } from "./values.js";

export const HISTORY_LIMIT = 10;

export interface WhatIfEntry {
  at: number;
  modelId: number | "auto";
  applicationId: string;
  inputs: Record<string, string>;
  coInputs: Record<string, string> | null;
  result?: ScoreResult;
  error?: ApiError;
}

function toAttributes(inputs: Record<string, string>): Record<string, AttributeValue> {
  const attributes: Record<string, AttributeValue> = {};
  for (const [name, text] of Object.entries(inputs)) {
    if (text.trim() === "") continue;
    attributes[name] = parseAttributeInput(text);
  }
  return attributes;
}

// One author's scoring sandbox. Every number it holds came out of an API
// response; re-running an entry re-asks the server rather than reusing
// the stored result.
export class WhatIfSession {
  modelId: number | "auto" = "auto";
  applicationId = "CONSOLE";
  recordId = "what-if";
  inputs: Record<string, string> = {};
  coInputs: Record<string, string> | null = null;
  kpiList: string[] = [];
  last: ScoreResult | ApiError | null = null;
  history: WhatIfEntry[] = [];

  buildRequest(): ScoreRequest {
    const req: ScoreRequest = {
      application_id: this.applicationId,
      record: { record_id: this.recordId, attributes: toAttributes(this.inputs) },
    };
    // "auto" omits model_id so the server's selection picks the model
    if (this.modelId !== "auto") req.model_id = this.modelId;
    if (this.kpiList.length > 0) req.kpi_list = [...this.kpiList];
    if (this.coInputs !== null) {
      req.co_record = { record_id: `${this.recordId}-co`, attributes: toAttributes(this.coInputs) };
    }
    return req;
  }

  async submit(client: Client): Promise<WhatIfEntry> {
    const entry: WhatIfEntry = {
      at: Date.now(),
      modelId: this.modelId,
      applicationId: this.applicationId,
      inputs: { ...this.inputs },
      coInputs: this.coInputs === null ? null : { ...this.coInputs },
    };
    try {
      entry.result = await client.score(this.buildRequest());
      this.last = entry.result;
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      entry.error = err;
      this.last = err;
    }
    this.history.push(entry);
    if (this.history.length > HISTORY_LIMIT) this.history.shift();
    return entry;
  }

  rerun(client: Client, entry: WhatIfEntry): Promise<WhatIfEntry> {
    this.modelId = entry.modelId;
    this.applicationId = entry.applicationId;
    this.inputs = { ...entry.inputs };
    this.coInputs = entry.coInputs === null ? null : { ...entry.coInputs };
    return this.submit(client);
  }
}
