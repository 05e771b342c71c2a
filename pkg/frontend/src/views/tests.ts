/**
 * Tests view: build or paste a suite spec, run it, inspect verdicts and
 * fairness tables. The suite spec is validated client-side before submission.
 */

import { Digestible, FairnessPayload, TestResultPayload } from "../api.js";
import { el, verbatim } from "../render.js";

const SUITE_TYPES = new Set(["mft", "inv", "dir", "fuzz"]);

/** Client-side validation; returns error messages (empty = valid). */
export function validateSuiteSpec(raw: string): { suite: unknown[] | null; errors: string[] } {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (exc) {
    return { suite: null, errors: [`not valid JSON: ${(exc as Error).message}`] };
  }
  if (!Array.isArray(parsed)) return { suite: null, errors: ["suite must be a JSON array"] };
  if (parsed.length === 0) return { suite: null, errors: ["suite must not be empty"] };
  const errors: string[] = [];
  parsed.forEach((entry, index) => {
    if (typeof entry !== "object" || entry === null) {
      errors.push(`entry ${index}: must be an object`);
      return;
    }
    const type = (entry as Record<string, unknown>).type;
    if (typeof type !== "string" || !SUITE_TYPES.has(type.toLowerCase())) {
      errors.push(`entry ${index}: type must be one of mft, inv, dir, fuzz`);
      return;
    }
    const lowered = type.toLowerCase();
    const has = (key: string) => key in (entry as Record<string, unknown>);
    if (lowered === "mft" && !has("template")) errors.push(`entry ${index}: mft needs a template`);
    if ((lowered === "inv" || lowered === "dir") && !has("split") && !has("template")) {
      errors.push(`entry ${index}: ${lowered} needs a split or template`);
    }
    if (lowered === "dir" && !has("target_label")) errors.push(`entry ${index}: dir needs target_label`);
  });
  return { suite: errors.length ? null : (parsed as unknown[]), errors };
}

export function renderTestResult(digestible: Digestible<TestResultPayload>): HTMLElement {
  const payload = digestible.payload;
  const allGreen = payload.n_failures === 0;
  const summary = el("p", { class: `suite-summary ${allGreen ? "ok" : "bad"}` }, [
    `${payload.kind}: `,
    el("span", { class: "n-cases num" }, [verbatim(payload.n_cases)]),
    " cases, ",
    el("span", { class: "n-failures num" }, [verbatim(payload.n_failures)]),
    " failures, failure rate ",
    el("span", { class: "failure-rate num" }, [verbatim(payload.failure_rate)]),
  ]);
  const section = el("section", { class: "test-result" }, [summary]);
  for (const verdict of payload.verdicts) {
    const details = el("details", { class: verdict.passed ? "case pass" : "case fail" }, [
      el("summary", {}, [`${verdict.case_id}: ${verdict.passed ? "pass" : "FAIL"}`]),
      el("p", {}, ["original: ", el("span", { class: "mono" }, [verdict.original_text])]),
      el("p", {}, ["original output: ", el("span", { class: "num" }, [verbatim(verdict.original_output)])]),
    ]);
    if (verdict.variant_text !== null) {
      details.append(
        el("p", {}, ["variant: ", el("span", { class: "mono" }, [verdict.variant_text])]),
        el("p", {}, ["variant output: ", el("span", { class: "num" }, [verbatim(verdict.variant_output)])]),
      );
    }
    if (verdict.expected !== null) {
      details.append(el("p", {}, ["expected: ", el("span", { class: "num" }, [verbatim(verdict.expected)])]));
    }
    section.append(details);
  }
  return section;
}

export function renderFuzzResult(digestible: Digestible): HTMLElement {
  const payload = digestible.payload as {
    corpus_version: string;
    verdicts: { name: string; verdict: string; detail: string }[];
  };
  const table = el("table", {}, [el("tr", {}, [el("th", {}, ["input"]), el("th", {}, ["verdict"])])]);
  for (const verdict of payload.verdicts) {
    table.append(
      el("tr", { class: verdict.verdict === "ok" ? "pass" : "fail" }, [
        el("td", {}, [verdict.name]),
        el("td", { class: "verdict" }, [verdict.verdict]),
      ]),
    );
  }
  return el("section", { class: "fuzz-result" }, [
    el("p", {}, [`security fuzz (${payload.corpus_version})`]),
    table,
  ]);
}

export function renderFairness(digestible: Digestible<FairnessPayload>): HTMLElement {
  const payload = digestible.payload;
  const classification = payload.positive_label !== undefined;
  const rateOf = (g: (typeof payload.groups)[number]) =>
    classification ? (g.positive_rate ?? 0) : (g.mean_prediction ?? 0);
  const maxRate = Math.max(...payload.groups.map(rateOf), 0) || 1;
  const table = el("table", { class: "fairness" }, [
    el("tr", {}, [
      el("th", {}, ["group"]),
      el("th", {}, ["n"]),
      el("th", {}, [classification ? "positive rate" : "mean prediction"]),
      el("th", {}, [""]),
    ]),
  ]);
  for (const group of payload.groups) {
    const bar = el("div", { class: "bar" });
    bar.style.width = `${(100 * rateOf(group)) / maxRate}%`;
    table.append(
      el("tr", {}, [
        el("td", {}, [group.group]),
        el("td", { class: "num group-n" }, [verbatim(group.n)]),
        el("td", { class: "num group-rate" }, [verbatim(rateOf(group))]),
        el("td", { class: "bar-cell" }, [bar]),
      ]),
    );
  }
  const headline = classification
    ? el("p", {}, [
        "demographic parity diff ",
        el("span", { class: "dp-diff num" }, [verbatim(payload.demographic_parity_diff)]),
        ", ratio ",
        el("span", { class: "dp-ratio num" }, [verbatim(payload.demographic_parity_ratio)]),
      ])
    : el("p", {}, [
        "KS diff ",
        el("span", { class: "dp-ks num" }, [verbatim(payload.dp_ks_diff)]),
      ]);
  return el("section", { class: "fairness-report" }, [
    el("p", {}, [`fairness by ${payload.attribute}`]),
    table,
    headline,
  ]);
}

export interface TestsHandlers {
  onRun(suite: unknown[]): void;
}

export function renderSuiteControls(handlers: TestsHandlers): HTMLElement {
  const input = el("textarea", { class: "suite-spec", rows: "6" });
  input.value = JSON.stringify(
    [{ type: "inv", split: "test", perturber: { kind: "typo", rate: 0.1 } }],
    null,
    2,
  );
  const errors = el("ul", { class: "form-errors" });
  const submit = el("button", { class: "submit" }, ["run suite"]);
  submit.addEventListener("click", () => {
    errors.replaceChildren();
    const { suite, errors: messages } = validateSuiteSpec(input.value);
    if (suite === null) {
      for (const message of messages) errors.append(el("li", {}, [message]));
      return;
    }
    handlers.onRun(suite);
  });
  return el("div", { class: "controls" }, [input, submit, errors]);
}
