// Typed client for the recognition service. The fetch implementation is
// injectable so tests can point it anywhere.

export interface Meta {
  dims: { w: number; h: number };
  label_count: number;
  version: number;
}

export interface LabelEntry {
  label: string;
  teach_count: number;
}

export interface Score {
  label: string;
  psi: number;
  mu: number;
  q_num: number;
  q_den: number;
  q_display: string;
}

export type DecisionKind = "match" | "unknown" | "empty_kb";

export interface Decision {
  kind: DecisionKind;
  best: Score | null;
  scores: Score[];
  unscorable: string[];
}

export interface TeachResult {
  label: string;
  teach_count: number;
  version: number;
}

export interface WeightsDoc {
  label: string;
  teach_count: number;
  rows: number[][];
}

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "", fetchImpl: FetchLike = fetch) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const message =
        typeof body === "object" && body !== null && "error" in body
          ? String((body as { error: unknown }).error)
          : `request failed with status ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  meta(): Promise<Meta> {
    return this.request<Meta>("/api/meta");
  }

  labels(): Promise<LabelEntry[]> {
    return this.request<LabelEntry[]>("/api/labels");
  }

  teach(label: string, rows: string[]): Promise<TeachResult> {
    return this.request<TeachResult>("/api/teach", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ label, rows }),
    });
  }

  classify(rows: string[], threshold?: number | string): Promise<Decision> {
    const payload: Record<string, unknown> = { rows };
    if (threshold !== undefined) payload.threshold = threshold;
    return this.request<Decision>("/api/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  weights(label: string): Promise<WeightsDoc> {
    return this.request<WeightsDoc>(`/api/weights/${encodeURIComponent(label)}`);
  }

  forget(label: string): Promise<{ version: number }> {
    return this.request<{ version: number }>(
      `/api/labels/${encodeURIComponent(label)}`,
      { method: "DELETE" },
    );
  }
}
