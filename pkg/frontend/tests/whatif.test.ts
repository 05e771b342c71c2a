import { describe, expect, it } from "vitest";

import type { AttributionPayload, Digestible, PredictResponse } from "../src/api.js";
import { InflightGate } from "../src/requests.js";
import { predictionDirection, renderWhatIfDiff, WhatIfSide } from "../src/views/whatif.js";

import editedExplain from "./fixtures/whatif_edited_explain.json";
import editedPredict from "./fixtures/whatif_edited_predict.json";
import originalExplain from "./fixtures/whatif_original_explain.json";
import originalPredict from "./fixtures/whatif_original_predict.json";

type Attribution = Digestible<AttributionPayload>;

const origExplain = originalExplain as unknown as Attribution;
const editExplain = editedExplain as unknown as Attribution;
const origPredict = originalPredict as unknown as PredictResponse;
const editPredict = editedPredict as unknown as PredictResponse;

function side(explain: Attribution, predict: PredictResponse): WhatIfSide {
  return {
    text: explain.payload.text,
    prediction: (predict.outputs as number[])[0],
    attribution: explain,
  };
}

describe("what-if diff on the recorded additive fixture", () => {
  const original = side(origExplain, origPredict);
  const edited = side(editExplain, editPredict);

  it("shows both predictions verbatim", () => {
    const root = renderWhatIfDiff(original, edited);
    const shown = [...root.querySelectorAll(".prediction")].map((n) => n.textContent);
    expect(shown).toEqual([String(original.prediction), String(edited.prediction)]);
  });

  it("delta direction matches the removed token's attribution sign", () => {
    // the edited text removed exactly one token; find it and its weight
    const removed = origExplain.payload.tokens.filter(
      (token) => !editExplain.payload.tokens.includes(token),
    );
    expect(removed).toEqual(["alpha"]);
    const weight =
      origExplain.payload.rendered_weights[origExplain.payload.tokens.indexOf(removed[0])];
    expect(weight).toBeGreaterThan(0);

    const root = renderWhatIfDiff(original, edited);
    const marker = root.querySelector(".delta") as HTMLElement;
    // removing a positively attributed token must push the prediction down
    expect(marker.dataset.direction).toBe("down");
    // and the sign of (original - edited) equals the sign of the weight
    expect(Math.sign(original.prediction - edited.prediction)).toBe(Math.sign(weight));
  });

  it("unchanged text yields a flat marker", () => {
    const root = renderWhatIfDiff(original, original);
    expect((root.querySelector(".delta") as HTMLElement).dataset.direction).toBe("flat");
  });

  it("direction helper is sign-exact", () => {
    expect(predictionDirection(0.2, 0.7)).toBe("up");
    expect(predictionDirection(0.7, 0.2)).toBe("down");
    expect(predictionDirection(0.4, 0.4)).toBe("flat");
  });
});

describe("in-flight cancellation", () => {
  it("starting a new request aborts the superseded one", () => {
    const gate = new InflightGate();
    const first = gate.next();
    expect(first.aborted).toBe(false);
    const second = gate.next();
    expect(first.aborted).toBe(true);
    expect(second.aborted).toBe(false);
  });
});
