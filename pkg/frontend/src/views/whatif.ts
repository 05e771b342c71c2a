/**
 * What-if view: edit the text, get prediction + explanation side by side
 * with the original. The prediction delta is shown as a direction marker
 * derived from the two verbatim payload values; rapid successive edits
 * cancel superseded in-flight requests (handled by the caller's
 * AbortController).
 */

import { AttributionPayload, Digestible } from "../api.js";
import { el, verbatim } from "../render.js";
import { renderTokenHeat } from "./explain.js";

export interface WhatIfSide {
  text: string;
  /** scalar model output for the explained target (probability or score) */
  prediction: number;
  attribution: Digestible<AttributionPayload>;
}

export type Direction = "up" | "down" | "flat";

export function predictionDirection(original: number, edited: number): Direction {
  if (edited > original) return "up";
  if (edited < original) return "down";
  return "flat";
}

const ARROWS: Record<Direction, string> = { up: "▲", down: "▼", flat: "▬" };

export function renderWhatIfDiff(original: WhatIfSide, edited: WhatIfSide): HTMLElement {
  const direction = predictionDirection(original.prediction, edited.prediction);
  const delta = el(
    "span",
    { class: `delta ${direction}`, "data-direction": direction },
    [`${ARROWS[direction]} prediction ${direction === "flat" ? "unchanged" : direction}`],
  );
  return el("div", { class: "whatif-diff" }, [
    el("div", { class: "side original" }, [
      el("h3", {}, ["original"]),
      el("p", { class: "mono" }, [original.text]),
      el("p", {}, ["prediction ", el("span", { class: "prediction num" }, [verbatim(original.prediction)])]),
      renderTokenHeat(original.attribution.payload),
    ]),
    el("div", { class: "side edited" }, [
      el("h3", {}, ["edited"]),
      el("p", { class: "mono" }, [edited.text]),
      el("p", {}, ["prediction ", el("span", { class: "prediction num" }, [verbatim(edited.prediction)])]),
      renderTokenHeat(edited.attribution.payload),
    ]),
    el("div", { class: "verdict-line" }, [delta]),
  ]);
}

export interface WhatIfHandlers {
  onSubmit(text: string): void;
}

export function renderWhatIfControls(initialText: string, handlers: WhatIfHandlers): HTMLElement {
  const input = el("textarea", { class: "whatif-text", rows: "3" });
  input.value = initialText;
  const submit = el("button", { class: "submit" }, ["predict & explain"]);
  const error = el("span", { class: "form-error" });
  submit.addEventListener("click", () => {
    if (input.value.trim() === "") {
      error.textContent = "enter a non-empty text";
      return;
    }
    error.textContent = "";
    handlers.onSubmit(input.value);
  });
  return el("div", { class: "controls" }, [input, submit, error]);
}
