import { describe, expect, it } from "vitest";

import type { AttributionPayload, Digestible } from "../src/api.js";
import { renderAttribution, renderTokenHeat } from "../src/views/explain.js";

import attributionFixture from "./fixtures/attribution_lime.json";

const digestible = attributionFixture as unknown as Digestible<AttributionPayload>;

function alphaOf(span: HTMLElement): number {
  const bg = span.style.backgroundColor;
  const withAlpha = bg.match(/rgba\(\d+, \d+, \d+, ([\d.]+)\)/);
  if (withAlpha) return parseFloat(withAlpha[1]);
  return bg.startsWith("rgb(") ? 1 : 0; // jsdom folds alpha 1 into rgb()
}

describe("attribution rendering (recorded fixture)", () => {
  it("shows base value and weight sum verbatim", () => {
    const root = renderAttribution(digestible);
    expect(root.querySelector(".base-value")?.textContent).toBe(
      String(digestible.payload.base_value),
    );
    expect(root.querySelector(".weights-sum")?.textContent).toBe(
      String(digestible.payload.weights_sum),
    );
  });

  it("renders every token weight verbatim", () => {
    const root = renderAttribution(digestible);
    const cells = [...root.querySelectorAll(".weight-value")];
    expect(cells.map((c) => c.textContent)).toEqual(
      digestible.payload.rendered_weights.map((w) => String(w)),
    );
  });

  it("colors tokens monotonically in |weight|", () => {
    const payload: AttributionPayload = {
      ...digestible.payload,
      tokens: ["strong", "weak"],
      rendered_weights: [0.5, 0.2],
    };
    const spans = [...renderTokenHeat(payload).querySelectorAll(".token")] as HTMLElement[];
    expect(alphaOf(spans[0])).toBeGreaterThan(alphaOf(spans[1]));
  });

  it("negative weights use the other side of the diverging scale", () => {
    const payload: AttributionPayload = {
      ...digestible.payload,
      tokens: ["up", "down"],
      rendered_weights: [0.4, -0.4],
    };
    const spans = [...renderTokenHeat(payload).querySelectorAll(".token")] as HTMLElement[];
    expect(spans[0].style.backgroundColor).not.toBe(spans[1].style.backgroundColor);
    expect(alphaOf(spans[0])).toBeCloseTo(alphaOf(spans[1]), 10);
  });

  it("all-zero weights render uniformly neutral", () => {
    const payload: AttributionPayload = {
      ...digestible.payload,
      tokens: ["a", "b"],
      rendered_weights: [0, 0],
    };
    const spans = [...renderTokenHeat(payload).querySelectorAll(".token")] as HTMLElement[];
    for (const span of spans) {
      expect(span.style.backgroundColor).toBe("transparent");
    }
  });
});
