/**
 * Typed client for the prediction service. Every displayed class or
 * explanation in the console comes through here; nothing is predicted
 * locally.
 */

export type Encoding = "nodes" | "paths";

export interface FeatureInfo {
  name: string;
  kind: "numeric" | "categorical";
  categories: string[] | null;
  thresholds: number[] | null;
}

export interface ModelInfo {
  target: { name: string; classes: string[] };
  features: FeatureInfo[];
  labels: Record<string, Record<string, string>>;
}

export interface ExplanationNode {
  label: string;
  children: ExplanationNode[];
}

export interface ExplainRequest {
  case: Record<string, number | string>;
  encoding?: Encoding;
  case_id?: number;
}

export interface ExplainResponse {
  prediction: string;
  explanations: ExplanationNode[];
  rendered: string;
}

export interface WhatIfOverride {
  feature: string;
  value: number | string;
}

export interface WhatIfRequest extends ExplainRequest {
  overrides: WhatIfOverride[];
}

export interface WhatIfItem {
  override: WhatIfOverride;
  prediction: string;
  changed: boolean;
  explanations: ExplanationNode[];
  rendered: string;
}

export interface FieldError {
  field: string;
  message: string;
}

/** Non-2xx response, with per-field details when the service sent them. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    message: string,
    readonly fieldErrors: FieldError[] = [],
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

const isFieldErrorList = (detail: unknown): detail is FieldError[] =>
  Array.isArray(detail) &&
  detail.every(
    (d) =>
      typeof d === "object" &&
      d !== null &&
      typeof (d as FieldError).field === "string" &&
      typeof (d as FieldError).message === "string",
  );

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail: unknown = null;
  try {
    detail = (await response.json()).detail;
  } catch {
    // non-JSON body; fall through to the generic message
  }
  if (isFieldErrorList(detail)) {
    throw new ServiceError(response.status, "validation failed", detail);
  }
  const message =
    typeof detail === "string" ? detail : `request failed (${response.status})`;
  throw new ServiceError(response.status, message);
}

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private async getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
    const response = await fetch(this.baseUrl + path, { signal });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async postJson<T>(
    path: string,
    body: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  getModel(signal?: AbortSignal): Promise<ModelInfo> {
    return this.getJson<ModelInfo>("/model", signal);
  }

  async getProgram(
    name: "nodes" | "paths" | "extra",
    signal?: AbortSignal,
  ): Promise<string> {
    const response = await fetch(`${this.baseUrl}/programs/${name}`, { signal });
    await raiseForStatus(response);
    return response.text();
  }

  explain(request: ExplainRequest, signal?: AbortSignal): Promise<ExplainResponse> {
    return this.postJson<ExplainResponse>("/explain", request, signal);
  }

  whatIf(request: WhatIfRequest, signal?: AbortSignal): Promise<WhatIfItem[]> {
    return this.postJson<WhatIfItem[]>("/whatif", request, signal);
  }
}
