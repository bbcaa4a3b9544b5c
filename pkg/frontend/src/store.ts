import type { ApiClient } from "./api.js";
import type { CatalogView, StateView } from "./types.js";

export type Listener = () => void;

/** Polls server state (default every 1 s); all state is authoritative on the
 * server — the store is only a view cache. */
export class Store {
  state: StateView | null = null;
  catalog: CatalogView | null = null;
  lastError: string | null = null;
  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(private readonly api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private notify() {
    for (const fn of this.listeners) fn();
  }

  async refresh(): Promise<void> {
    try {
      if (this.catalog === null) {
        this.catalog = await this.api.getCatalog();
      }
      this.state = await this.api.getState();
      this.lastError = null;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
    }
    this.notify();
  }

  setError(message: string | null) {
    this.lastError = message;
    this.notify();
  }

  start(intervalMs = 1000) {
    this.stop();
    this.timer = setInterval(() => void this.refresh(), intervalMs);
  }

  stop() {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
