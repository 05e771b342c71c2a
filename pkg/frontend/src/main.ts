/**
 * Single-page audit UI over the service API.
 *
 * The URL query is the single source of truth for the view (deep links
 * reconstruct it exactly); rendering delegates to the pure view modules,
 * and a per-view AbortController cancels superseded requests.
 */

import { api, AttributionPayload, Digestible, PredictResponse } from "./api.js";
import { clear, el } from "./render.js";
import { InflightGate } from "./requests.js";
import { DEFAULT_STATE, parseViewState, serializeViewState, ViewName, ViewState } from "./state.js";
import { renderDrilldown, renderInstanceTable } from "./views/browse.js";
import { renderAttribution, renderExplainControls } from "./views/explain.js";
import { renderWhatIfControls, renderWhatIfDiff, WhatIfSide } from "./views/whatif.js";
import {
  renderFairness,
  renderFuzzResult,
  renderSuiteControls,
  renderTestResult,
} from "./views/tests.js";

const PAGE_SIZE = 25;

let state: ViewState = DEFAULT_STATE;
const gate = new InflightGate();

function navigate(next: Partial<ViewState>, push = true): void {
  state = { ...state, ...next };
  const query = serializeViewState(state);
  if (push) history.pushState(null, "", query || location.pathname);
  void render();
}

function supersede(): AbortSignal {
  return gate.next();
}

function errorBanner(message: string, retry: () => void): HTMLElement {
  const button = el("button", {}, ["retry"]);
  button.addEventListener("click", retry);
  return el("div", { class: "banner error" }, [message, " ", button]);
}

async function render(): Promise<void> {
  const app = document.getElementById("app");
  if (!app) return;
  clear(app);
  renderNav(app);
  const body = el("div", { class: "view" });
  app.append(body);
  try {
    if (state.view === "browse") await renderBrowse(body);
    else if (state.view === "explain") await renderExplain(body);
    else if (state.view === "whatif") await renderWhatIf(body);
    else await renderTests(body);
  } catch (exc) {
    if ((exc as Error).name === "AbortError") return;
    body.append(errorBanner(`service error: ${(exc as Error).message}`, () => void render()));
  }
}

function renderNav(app: HTMLElement): void {
  const nav = el("nav", {});
  const views: ViewName[] = ["browse", "explain", "whatif", "tests"];
  for (const view of views) {
    const button = el("button", { class: state.view === view ? "tab active" : "tab" }, [view]);
    button.addEventListener("click", () => navigate({ view }));
    nav.append(button);
  }
  app.append(nav);
}

async function renderBrowse(body: HTMLElement): Promise<void> {
  const meta = await api.meta();
  const splitSelect = el("select", { class: "split" });
  for (const name of Object.keys(meta.splits)) {
    const option = el("option", { value: name }, [name]);
    if (name === state.split) option.selected = true;
    splitSelect.append(option);
  }
  splitSelect.addEventListener("change", () =>
    navigate({ split: splitSelect.value, page: 0, drillGold: null, drillPred: null }),
  );
  body.append(el("label", {}, ["split ", splitSelect]));

  const handlers = {
    onSelect: (instanceId: string) => navigate({ view: "explain", instance: instanceId }),
    onPage: (delta: number) => navigate({ page: Math.max(0, state.page + delta) }),
  };
  if (state.drillGold !== null && state.drillPred !== null) {
    const cell = await api.drilldown(state.split, state.drillGold, state.drillPred);
    body.append(renderDrilldown(cell, handlers));
    return;
  }
  const page = await api.instances(state.split, state.page * PAGE_SIZE, PAGE_SIZE);
  body.append(renderInstanceTable(page, handlers));
}

async function renderExplain(body: HTMLElement): Promise<void> {
  body.append(
    renderExplainControls(
      { method: state.method, targetLabel: state.targetLabel, seed: state.seed, params: state.params },
      {
        onSubmit: (controls) =>
          navigate({
            method: controls.method,
            targetLabel: controls.targetLabel,
            seed: controls.seed,
            params: controls.params,
          }),
      },
    ),
  );
  if (state.instance === null && state.whatifText === "") {
    body.append(el("p", { class: "empty" }, ["Select an instance in the browse view first."]));
    return;
  }
  const digestible = await api.explain(
    {
      method: state.method,
      instance_id: state.instance ?? undefined,
      text: state.instance === null ? state.whatifText : undefined,
      target_label: state.targetLabel,
      params: state.params,
      seed: state.seed,
    },
    supersede(),
  );
  body.append(renderAttribution(digestible));
}

async function explainSide(text: string, signal: AbortSignal): Promise<WhatIfSide> {
  // what-if flow: POST /predict, then POST /explain with the raw text
  const [reply, attribution] = await Promise.all([
    api.predict([text], signal),
    api.explain(
      { method: state.method, text, target_label: state.targetLabel, params: state.params, seed: state.seed },
      signal,
    ),
  ]);
  return { text, prediction: scalarPrediction(reply, attribution), attribution };
}

/** Pick the explained target's value out of the verbatim predict payload. */
function scalarPrediction(
  reply: PredictResponse,
  attribution: Digestible<AttributionPayload>,
): number {
  const output = reply.outputs[0];
  if (Array.isArray(output)) {
    const target = attribution.payload.target_label;
    const index = target === null ? 0 : reply.labels.indexOf(target);
    return output[Math.max(0, index)];
  }
  return output;
}

async function renderWhatIf(body: HTMLElement): Promise<void> {
  const original = state.instance;
  if (original === null) {
    body.append(el("p", { class: "empty" }, ["Select an instance in the browse view first."]));
    return;
  }
  body.append(
    renderWhatIfControls(state.whatifText, {
      onSubmit: (text) => navigate({ whatifText: text }),
    }),
  );
  const signal = supersede();
  const page = await api.instances(state.split, 0, 1000);
  const row = page.instances.find((r) => r.id === original);
  if (!row) {
    body.append(el("p", { class: "empty" }, ["Unknown instance."]));
    return;
  }
  const left = await explainSideForInstance(original, row.text, signal);
  const editedText = state.whatifText || row.text;
  const right = await explainSide(editedText, signal);
  body.append(renderWhatIfDiff(left, right));
}

async function explainSideForInstance(
  instanceId: string,
  text: string,
  signal: AbortSignal,
): Promise<WhatIfSide> {
  const [reply, attribution] = await Promise.all([
    api.predict([text], signal),
    api.explain(
      {
        method: state.method,
        instance_id: instanceId,
        target_label: state.targetLabel,
        params: state.params,
        seed: state.seed,
      },
      signal,
    ),
  ]);
  return { text, prediction: scalarPrediction(reply, attribution), attribution };
}

async function renderTests(body: HTMLElement): Promise<void> {
  const results = el("div", { class: "results" });
  body.append(
    renderSuiteControls({
      onRun: (suite) => {
        void (async () => {
          clear(results);
          try {
            const reply = await api.exposeRun(suite, state.seed, supersede());
            for (const digestible of reply.digestibles) {
              results.append(
                digestible.kind === "fuzz-result"
                  ? renderFuzzResult(digestible)
                  : renderTestResult(digestible as never),
              );
            }
          } catch (exc) {
            if ((exc as Error).name === "AbortError") return;
            results.append(errorBanner((exc as Error).message, () => undefined));
          }
        })();
      },
    }),
  );
  const attributeInput = el("input", {
    class: "fairness-attribute",
    placeholder: "protected attribute",
    value: state.fairnessAttribute ?? "",
  });
  const fairnessButton = el("button", {}, ["fairness"]);
  fairnessButton.addEventListener("click", () =>
    navigate({ fairnessAttribute: attributeInput.value || null }),
  );
  body.append(el("div", { class: "controls" }, [attributeInput, fairnessButton]));
  body.append(results);
  if (state.fairnessAttribute) {
    const digestible = await api.fairness(state.split, state.fairnessAttribute);
    results.append(renderFairness(digestible));
  }
}

export function boot(): void {
  state = parseViewState(location.search);
  window.addEventListener("popstate", () => {
    state = parseViewState(location.search);
    void render();
  });
  void render();
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
