/**
 * Typed client for the audit service REST API (v1).
 *
 * The UI holds no analysis logic: everything rendered comes verbatim from
 * these payloads. All POSTs accept an AbortSignal so superseded requests
 * can be cancelled.
 */

const API = "/api/v1";

export interface Meta {
  task: "classification" | "regression";
  labels: string[];
  splits: Record<string, number>;
  model_id: string | null;
  model_kind: string | null;
  artifact_version: string;
  seed: number;
}

export interface InstanceRow {
  id: string;
  text: string;
  gold: string | number | null;
  predicted: string | number | null;
  correct: boolean | null;
}

export interface InstancesPage {
  split: string;
  total: number;
  offset: number;
  limit: number;
  instances: InstanceRow[];
}

export interface Digestible<P = Record<string, unknown>> {
  kind: string;
  payload: P;
  provenance: Record<string, unknown>;
}

export interface AttributionPayload {
  method: string;
  instance_id: string;
  text: string;
  target_label: string | null;
  base_value: number;
  tokens: string[];
  rendered_weights: number[];
  weights_sum: number;
  params: Record<string, unknown>;
}

export interface PredictResponse {
  texts: string[];
  outputs: number[][] | number[];
  labels: string[];
}

export interface DrilldownResponse {
  split: string;
  gold: string;
  pred: string;
  ids: string[];
  texts: Record<string, string>;
}

export interface TestResultPayload {
  kind: string;
  n_cases: number;
  n_failures: number;
  failure_rate: number;
  verdicts: CaseVerdict[];
  example_failures: CaseVerdict[];
  meta: Record<string, unknown>;
}

export interface CaseVerdict {
  case_id: string;
  passed: boolean;
  original_text: string;
  original_output: unknown;
  variant_text: string | null;
  variant_output: unknown;
  expected: string | null;
  detail: string;
}

export interface FairnessGroup {
  group: string;
  n: number;
  positive_rate?: number;
  tpr?: number | null;
  fpr?: number | null;
  accuracy?: number | null;
  mean_prediction?: number;
  loss?: number | null;
}

export interface FairnessPayload {
  attribute: string;
  positive_label?: string;
  groups: FairnessGroup[];
  demographic_parity_diff?: number;
  demographic_parity_ratio?: number;
  equal_opportunity_diff?: number | null;
  equalized_odds_diff?: number | null;
  dp_ks_diff?: number;
  group_loss_max?: number | null;
  flags: string[];
}

export interface ExplainRequest {
  method: string;
  instance_id?: string;
  text?: string;
  target_label?: string | null;
  params?: Record<string, unknown>;
  seed?: number;
}

export class ApiError extends Error {
  constructor(public code: number, message: string) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(API + path, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(body.code ?? response.status, body.message ?? response.statusText);
  }
  return body as T;
}

function post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
}

export const api = {
  meta: (): Promise<Meta> => request("/meta"),
  instances: (split: string, offset: number, limit: number): Promise<InstancesPage> =>
    request(`/instances?split=${encodeURIComponent(split)}&offset=${offset}&limit=${limit}`),
  drilldown: (split: string, gold: string, pred: string): Promise<DrilldownResponse> =>
    request(
      `/examine/drilldown?split=${encodeURIComponent(split)}&gold=${encodeURIComponent(gold)}&pred=${encodeURIComponent(pred)}`,
    ),
  metrics: (split: string): Promise<Digestible> =>
    request(`/examine/metrics?split=${encodeURIComponent(split)}`),
  predict: (texts: string[], signal?: AbortSignal): Promise<PredictResponse> =>
    post("/predict", { texts }, signal),
  explain: (req: ExplainRequest, signal?: AbortSignal): Promise<Digestible<AttributionPayload>> =>
    post("/explain", req, signal),
  exposeRun: (
    suite: unknown[],
    seed: number,
    signal?: AbortSignal,
  ): Promise<{ digestibles: Digestible[] }> => post("/expose/run", { suite, seed }, signal),
  fairness: (split: string, attribute: string): Promise<Digestible<FairnessPayload>> =>
    request(
      `/expose/fairness?split=${encodeURIComponent(split)}&attribute=${encodeURIComponent(attribute)}`,
    ),
};
