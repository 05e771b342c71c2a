/**
 * Explain view: token-highlight rendering of an attribution digestible.
 *
 * Tokens are tinted on a diverging scale anchored at zero (blue positive,
 * red negative) and normalized by this explanation's max |weight|, so
 * saturation is comparable within one explanation only. All numbers shown
 * are verbatim payload values.
 */

import { AttributionPayload, Digestible } from "../api.js";
import { el, verbatim, weightColor } from "../render.js";

export interface ExplainControls {
  method: string;
  targetLabel: string | null;
  seed: number;
  params: Record<string, unknown>;
}

export interface ExplainHandlers {
  onSubmit(controls: ExplainControls): void;
}

export function renderTokenHeat(payload: AttributionPayload): HTMLElement {
  const maxAbs = Math.max(...payload.rendered_weights.map(Math.abs), 0);
  const spans: (Node | string)[] = [];
  payload.tokens.forEach((token, index) => {
    const weight = payload.rendered_weights[index];
    const span = el("span", { class: "token", "data-weight": String(weight) }, [token]);
    span.style.backgroundColor = weightColor(weight, maxAbs);
    span.title = `${token}: ${verbatim(weight)}`;
    spans.push(span, " ");
  });
  return el("p", { class: "token-heat" }, spans);
}

export function renderWeightTable(payload: AttributionPayload): HTMLElement {
  const table = el("table", {}, [
    el("tr", {}, [el("th", {}, ["token"]), el("th", {}, ["weight"])]),
  ]);
  payload.tokens.forEach((token, index) => {
    table.append(
      el("tr", {}, [
        el("td", {}, [token]),
        el("td", { class: "num weight-value" }, [verbatim(payload.rendered_weights[index])]),
      ]),
    );
  });
  return table;
}

export function renderAttribution(digestible: Digestible<AttributionPayload>): HTMLElement {
  const payload = digestible.payload;
  const summary = el("p", { class: "meta" }, [
    `method ${payload.method}`,
    payload.target_label !== null ? `, target ${payload.target_label}` : "",
    ", base value ",
    el("span", { class: "base-value num" }, [verbatim(payload.base_value)]),
    ", sum of weights ",
    el("span", { class: "weights-sum num" }, [verbatim(payload.weights_sum)]),
  ]);
  return el("section", { class: "attribution" }, [
    summary,
    renderTokenHeat(payload),
    renderWeightTable(payload),
  ]);
}

export function renderExplainControls(
  initial: ExplainControls,
  handlers: ExplainHandlers,
): HTMLElement {
  const method = el("select", { class: "method" });
  for (const name of ["lime", "kernelshap", "exact-shapley"]) {
    const option = el("option", { value: name }, [name]);
    if (name === initial.method) option.selected = true;
    method.append(option);
  }
  const target = el("input", {
    class: "target",
    placeholder: "target label (default: argmax)",
    value: initial.targetLabel ?? "",
  });
  const seed = el("input", { class: "seed", type: "number", value: String(initial.seed) });
  const params = el("textarea", { class: "params", rows: "2" });
  params.value = JSON.stringify(initial.params);
  const error = el("span", { class: "form-error" });
  const submit = el("button", { class: "submit" }, ["explain"]);
  submit.addEventListener("click", () => {
    let parsed: Record<string, unknown>;
    try {
      parsed = params.value.trim() === "" ? {} : JSON.parse(params.value);
    } catch {
      error.textContent = "params must be a JSON object";
      return;
    }
    error.textContent = "";
    handlers.onSubmit({
      method: method.value,
      targetLabel: target.value === "" ? null : target.value,
      seed: parseInt(seed.value, 10) || 0,
      params: parsed,
    });
  });
  return el("div", { class: "controls" }, [
    el("label", {}, ["method ", method]),
    el("label", {}, ["target ", target]),
    el("label", {}, ["seed ", seed]),
    el("label", {}, ["params ", params]),
    submit,
    error,
  ]);
}
