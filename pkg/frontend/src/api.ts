import type { CatalogView, RequestView, RuleView, StateView } from "./types.js";

/** Error raised for 4xx/5xx responses; carries the machine-readable code. */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

export class ApiClient {
  constructor(public readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(data.error ?? "HTTP_ERROR", resp.status, data.detail ?? resp.statusText);
    }
    return data as T;
  }

  getState(): Promise<StateView> {
    return this.request("GET", "/state");
  }

  getCatalog(): Promise<CatalogView> {
    return this.request("GET", "/catalog");
  }

  postContext(values: Record<string, Record<string, unknown>>, ts: number) {
    return this.request<{ snapshot: StateView["snapshot"] }>("POST", "/context", { values, ts });
  }

  useService(service: string, ts: number) {
    return this.request<{ request: RequestView | null }>("POST", "/usage", { service, ts });
  }

  submitReason(requestId: string, text: string, ts: number) {
    return this.request<{ rule: RuleView }>("POST", `/requests/${requestId}/reason`, { text, ts });
  }

  confirmPredicted(requestId: string, index: number, ts: number) {
    return this.request<{ rule: RuleView }>("POST", `/requests/${requestId}/confirm`, { index, ts });
  }

  dismiss(requestId: string, ts: number) {
    return this.request<{ ok: boolean }>("POST", `/requests/${requestId}/dismiss`, { ts });
  }

  selectAttributes(requestId: string, attributes: [string, string, string][], ts: number) {
    return this.request<{ ratio: number; accurate: boolean }>(
      "POST", `/requests/${requestId}/select`, { attributes, ts });
  }

  reject(service: string, ts: number) {
    return this.request<{ request: RequestView }>(
      "POST", `/recommendations/${service}/reject`, { ts });
  }

  deleteRule(ruleId: string) {
    return this.request<{ ok: boolean }>("DELETE", `/rules/${ruleId}`);
  }
}
