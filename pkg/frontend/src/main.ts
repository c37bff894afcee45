import { ApiError, Client } from "./api.js";
import { isScorecard, isWam, ModelDraft } from "./draft.js";
import {
  renderBanner,
  renderEditor,
  renderErrorResult,
  renderHistory,
  renderScoreResult,
} from "./render.js";
import type { ModelSummary } from "./types.js";
import { WhatIfSession } from "./whatif.js";

const BASE_KEY = "scoremill-api-base";
const DEFAULT_BASE = "http://127.0.0.1:8080";

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

let client = new Client(localStorage.getItem(BASE_KEY) ?? DEFAULT_BASE);
let summaries: ModelSummary[] = [];
let draft: ModelDraft | null = null;
const session = new WhatIfSession();

function banner(err: unknown): void {
  if (err instanceof ApiError) {
    renderBanner(byId("banners"), err);
  } else {
    throw err;
  }
}

async function refreshList(): Promise<void> {
  try {
    const list = await client.listModels();
    summaries = list.models;
    byId("snapshot").textContent = `snapshot v${list.snapshot_version}`;
  } catch (err) {
    banner(err);
    return;
  }
  const root = byId("model-list");
  root.replaceChildren();
  for (const summary of summaries) {
    const item = document.createElement("button");
    item.className = "model-item";
    item.textContent = `${summary.model_id} · ${summary.name} (v${summary.version}, ${summary.algorithm})`;
    item.addEventListener("click", () => void openModel(summary.model_id));
    root.append(item);
  }
  renderModelChoices();
}

function renderModelChoices(): void {
  const select = byId("whatif-model") as HTMLSelectElement;
  const current = select.value || "auto";
  select.replaceChildren();
  const auto = document.createElement("option");
  auto.value = "auto";
  auto.textContent = "auto (server selects)";
  select.append(auto);
  for (const summary of summaries) {
    const option = document.createElement("option");
    option.value = String(summary.model_id);
    option.textContent = `${summary.model_id} · ${summary.name}`;
    select.append(option);
  }
  select.value = [...select.options].some((o) => o.value === current) ? current : "auto";
}

function redrawEditor(): void {
  if (draft === null) return;
  const active = draft;
  renderEditor(byId("editor"), active, {
    onWeight: (name, value) => active.setIndicatorWeight(name, value),
    onRoleSplit: (name, primary, co) => active.setRoleSplit(name, primary, co),
    onExpr: (ruleId, indicator, text) => active.setConditionExpr(ruleId, indicator, text),
    onMark: (ruleId, indicator, text) => active.setMark(ruleId, indicator, text),
    onValidate: () => {
      active
        .validate(client)
        .then(() => redrawEditor())
        .catch(banner);
    },
    onSave: () => {
      active
        .save(client)
        .then(() => {
          redrawEditor();
          return refreshList();
        })
        .catch((err) => {
          redrawEditor();
          banner(err);
        });
    },
  });
}

async function openModel(modelId: number): Promise<void> {
  try {
    draft = new ModelDraft(await client.getModel(modelId));
  } catch (err) {
    banner(err);
    return;
  }
  redrawEditor();
  seedWhatIfFields();
}

// what-if input rows follow the opened model's attribute names
function seedWhatIfFields(): void {
  if (draft === null) return;
  const names = isWam(draft.doc.algorithm)
    ? draft.doc.algorithm.indicators.map((i) => i.name)
    : draft.doc.algorithm.parameters.map((p) => p.name);
  for (const name of names) {
    if (!(name in session.inputs)) session.inputs[name] = "";
  }
  if (isScorecard(draft.doc.algorithm) && session.coInputs === null) {
    (byId("whatif-co-toggle") as HTMLInputElement).disabled = false;
  }
  redrawWhatIfInputs();
}

function inputRows(root: HTMLElement, inputs: Record<string, string>): void {
  root.replaceChildren();
  for (const [name, value] of Object.entries(inputs)) {
    const label = document.createElement("label");
    label.textContent = name;
    const field = document.createElement("input");
    field.type = "text";
    field.value = value;
    field.addEventListener("change", () => {
      inputs[name] = field.value;
    });
    const remove = document.createElement("button");
    remove.textContent = "×";
    remove.addEventListener("click", () => {
      delete inputs[name];
      redrawWhatIfInputs();
    });
    const row = document.createElement("div");
    row.className = "whatif-row";
    row.append(label, field, remove);
    root.append(row);
  }
}

function redrawWhatIfInputs(): void {
  inputRows(byId("whatif-inputs"), session.inputs);
  const coRoot = byId("whatif-co-inputs");
  if (session.coInputs === null) {
    coRoot.replaceChildren();
  } else {
    inputRows(coRoot, session.coInputs);
  }
}

function redrawWhatIfResult(): void {
  const root = byId("whatif-result");
  if (session.last === null) {
    root.replaceChildren();
  } else if (session.last instanceof ApiError) {
    renderErrorResult(root, session.last);
  } else {
    renderScoreResult(root, session.last);
  }
  renderHistory(byId("whatif-history"), session, (entry) => {
    session
      .rerun(client, entry)
      .then(() => {
        redrawWhatIfInputs();
        redrawWhatIfResult();
      })
      .catch(banner);
  });
}

function wireStaticControls(): void {
  const base = byId("api-base") as HTMLInputElement;
  base.value = client.baseUrl;
  byId("api-connect").addEventListener("click", () => {
    localStorage.setItem(BASE_KEY, base.value);
    client = new Client(base.value);
    draft = null;
    byId("editor").replaceChildren();
    void refreshList();
  });

  byId("new-model").addEventListener("click", () => {
    draft = ModelDraft.blank();
    redrawEditor();
  });

  const modelSelect = byId("whatif-model") as HTMLSelectElement;
  modelSelect.addEventListener("change", () => {
    session.modelId = modelSelect.value === "auto" ? "auto" : Number(modelSelect.value);
  });

  const appId = byId("whatif-application") as HTMLInputElement;
  appId.value = session.applicationId;
  appId.addEventListener("change", () => {
    session.applicationId = appId.value;
  });

  const coToggle = byId("whatif-co-toggle") as HTMLInputElement;
  coToggle.addEventListener("change", () => {
    session.coInputs = coToggle.checked ? { ...session.inputs } : null;
    redrawWhatIfInputs();
  });

  byId("whatif-add").addEventListener("click", () => {
    const name = (byId("whatif-new-name") as HTMLInputElement).value.trim();
    if (name === "") return;
    session.inputs[name] = "";
    (byId("whatif-new-name") as HTMLInputElement).value = "";
    redrawWhatIfInputs();
  });

  byId("whatif-submit").addEventListener("click", () => {
    session
      .submit(client)
      .then(() => redrawWhatIfResult())
      .catch(banner);
  });
}

export function boot(): void {
  wireStaticControls();
  redrawWhatIfInputs();
  void refreshList();
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  boot();
}
