/**
 * Browse view: paged instance table with gold/predicted labels and a
 * correctness badge; optionally filtered down to one confusion cell.
 * Clicking a row selects the instance for the explain view.
 */

import { DrilldownResponse, InstancesPage } from "../api.js";
import { el, verbatim } from "../render.js";

export interface BrowseHandlers {
  onSelect(instanceId: string): void;
  onPage(delta: number): void;
}

export function renderInstanceTable(
  page: InstancesPage,
  handlers: BrowseHandlers,
): HTMLElement {
  const head = el("tr", {}, [
    el("th", {}, ["id"]),
    el("th", {}, ["text"]),
    el("th", {}, ["gold"]),
    el("th", {}, ["predicted"]),
    el("th", {}, ["verdict"]),
  ]);
  const table = el("table", { class: "instances" }, [head]);
  for (const row of page.instances) {
    const badge =
      row.correct === null
        ? el("span", { class: "badge muted" }, ["n/a"])
        : row.correct
          ? el("span", { class: "badge ok" }, ["correct"])
          : el("span", { class: "badge bad" }, ["wrong"]);
    const tr = el("tr", { class: "instance-row", "data-id": row.id }, [
      el("td", { class: "mono" }, [row.id]),
      el("td", {}, [row.text]),
      el("td", { class: "num" }, [verbatim(row.gold)]),
      el("td", { class: "num" }, [verbatim(row.predicted)]),
      el("td", {}, [badge]),
    ]);
    tr.addEventListener("click", () => handlers.onSelect(row.id));
    table.append(tr);
  }
  const pager = el("div", { class: "pager" }, [
    makePagerButton("previous", -1, page.offset === 0, handlers),
    el("span", {}, [
      `${page.offset + 1}-${Math.min(page.offset + page.limit, page.total)} of ${page.total}`,
    ]),
    makePagerButton("next", +1, page.offset + page.limit >= page.total, handlers),
  ]);
  if (page.instances.length === 0) {
    return el("div", {}, [el("p", { class: "empty" }, ["No instances in this split."])]);
  }
  return el("div", {}, [table, pager]);
}

function makePagerButton(
  label: string,
  delta: number,
  disabled: boolean,
  handlers: BrowseHandlers,
): HTMLButtonElement {
  const button = el("button", {}, [label]);
  button.disabled = disabled;
  button.addEventListener("click", () => handlers.onPage(delta));
  return button;
}

/** Rows restricted to one confusion cell, driven by the drilldown payload. */
export function renderDrilldown(
  cell: DrilldownResponse,
  handlers: BrowseHandlers,
): HTMLElement {
  const header = el("p", {}, [
    `Cell gold=${cell.gold}, predicted=${cell.pred}: ${cell.ids.length} instance(s)`,
  ]);
  const table = el("table", { class: "instances" }, [
    el("tr", {}, [el("th", {}, ["id"]), el("th", {}, ["text"])]),
  ]);
  for (const id of cell.ids) {
    const tr = el("tr", { class: "instance-row", "data-id": id }, [
      el("td", { class: "mono" }, [id]),
      el("td", {}, [cell.texts[id] ?? ""]),
    ]);
    tr.addEventListener("click", () => handlers.onSelect(id));
    table.append(tr);
  }
  return el("div", {}, [header, table]);
}
