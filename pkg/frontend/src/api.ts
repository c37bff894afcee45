import type {
  ModelDocument,
  ModelList,
  PutResult,
  ScoreRequest,
  ScoreResult,
  ValidateResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly details: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init: RequestInit = {}): Promise<T> {
    let res: Response;
    try {
      res = await this.fetchFn(`${this.baseUrl}${path}`, {
        ...init,
        headers: { "content-type": "application/json", ...init.headers },
      });
    } catch (err) {
      throw new ApiError(0, "unreachable", `API unreachable: ${String(err)}`);
    }
    if (res.status === 204) return undefined as T;
    const body = await res.json().catch(() => null);
    if (!res.ok) {
      throw new ApiError(
        res.status,
        typeof body?.code === "string" ? body.code : "internal",
        typeof body?.message === "string" ? body.message : `HTTP ${res.status}`,
        body?.details ?? {},
      );
    }
    return body as T;
  }

  health(): Promise<{ snapshot_version: number }> {
    return this.request("/healthz");
  }

  listModels(): Promise<ModelList> {
    return this.request("/v1/models");
  }

  getModel(modelId: number): Promise<ModelDocument> {
    return this.request(`/v1/models/${modelId}`);
  }

  putModel(modelId: number, doc: ModelDocument): Promise<PutResult> {
    return this.request(`/v1/models/${modelId}`, {
      method: "PUT",
      body: JSON.stringify(doc),
    });
  }

  deleteModel(modelId: number): Promise<void> {
    return this.request(`/v1/models/${modelId}`, { method: "DELETE" });
  }

  validateModel(doc: ModelDocument): Promise<ValidateResult> {
    return this.request("/v1/models/validate", {
      method: "POST",
      body: JSON.stringify(doc),
    });
  }

  score(req: ScoreRequest): Promise<ScoreResult> {
    return this.request("/v1/score", {
      method: "POST",
      body: JSON.stringify(req),
    });
  }
}
