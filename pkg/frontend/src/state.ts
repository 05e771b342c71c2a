/**
 * ViewState <-> URL query serialization.
 *
 * Every view is reconstructible from its URL, so auditors can share exact
 * views as deep links. Only non-default fields are written to the query.
 */

export type ViewName = "browse" | "explain" | "whatif" | "tests";

export interface ViewState {
  view: ViewName;
  split: string;
  page: number;
  instance: string | null;
  method: string;
  targetLabel: string | null;
  seed: number;
  params: Record<string, unknown>;
  whatifText: string;
  drillGold: string | null;
  drillPred: string | null;
  fairnessAttribute: string | null;
}

export const DEFAULT_STATE: ViewState = {
  view: "browse",
  split: "test",
  page: 0,
  instance: null,
  method: "lime",
  targetLabel: null,
  seed: 0,
  params: {},
  whatifText: "",
  drillGold: null,
  drillPred: null,
  fairnessAttribute: null,
};

const VIEWS: ViewName[] = ["browse", "explain", "whatif", "tests"];

export function serializeViewState(state: ViewState): string {
  const query = new URLSearchParams();
  const put = (key: string, value: string) => query.set(key, value);
  if (state.view !== DEFAULT_STATE.view) put("view", state.view);
  if (state.split !== DEFAULT_STATE.split) put("split", state.split);
  if (state.page !== 0) put("page", String(state.page));
  if (state.instance !== null) put("instance", state.instance);
  if (state.method !== DEFAULT_STATE.method) put("method", state.method);
  if (state.targetLabel !== null) put("target", state.targetLabel);
  if (state.seed !== 0) put("seed", String(state.seed));
  if (Object.keys(state.params).length > 0) put("params", JSON.stringify(state.params));
  if (state.whatifText !== "") put("text", state.whatifText);
  if (state.drillGold !== null) put("gold", state.drillGold);
  if (state.drillPred !== null) put("pred", state.drillPred);
  if (state.fairnessAttribute !== null) put("attribute", state.fairnessAttribute);
  const encoded = query.toString();
  return encoded ? `?${encoded}` : "";
}

export function parseViewState(query: string): ViewState {
  const params = new URLSearchParams(query.startsWith("?") ? query.slice(1) : query);
  const state: ViewState = { ...DEFAULT_STATE, params: {} };
  const view = params.get("view");
  if (view !== null && (VIEWS as string[]).includes(view)) state.view = view as ViewName;
  state.split = params.get("split") ?? state.split;
  state.page = parseInt(params.get("page") ?? "0", 10) || 0;
  state.instance = params.get("instance");
  state.method = params.get("method") ?? state.method;
  state.targetLabel = params.get("target");
  state.seed = parseInt(params.get("seed") ?? "0", 10) || 0;
  const rawParams = params.get("params");
  if (rawParams !== null) {
    try {
      state.params = JSON.parse(rawParams);
    } catch {
      state.params = {};
    }
  }
  state.whatifText = params.get("text") ?? "";
  state.drillGold = params.get("gold");
  state.drillPred = params.get("pred");
  state.fairnessAttribute = params.get("attribute");
  return state;
}
