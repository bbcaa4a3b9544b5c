import { ApiClient, ApiError } from "./api.js";
import { Store } from "./store.js";
import {
  Handlers,
  renderBanner,
  renderContextPanel,
  renderLockScreen,
  renderPrompts,
  renderRules,
  renderServicePanel,
  renderValidation,
  renderWidget,
} from "./views.js";
import type { AttributeView } from "./types.js";

export class App implements Handlers {
  readonly store: Store;
  private validation: { requestId: string; attributes: AttributeView[] } | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly now: () => number = () => Date.now(),
  ) {
    this.store = new Store(api);
    this.store.subscribe(() => this.render());
    this.root.addEventListener("click", (ev) => {
      const target = ev.target as HTMLElement;
      if (target.dataset.action === "retry") void this.refresh();
    });
  }

  async start(pollMs = 1000) {
    await this.refresh();
    this.store.start(pollMs);
  }

  stop() {
    this.store.stop();
  }

  refresh(): Promise<void> {
    return this.store.refresh();
  }

  /** Every mutating click issues exactly one API call, then re-syncs. */
  private async mutate(fn: () => Promise<unknown>): Promise<void> {
    try {
      await fn();
    } catch (err) {
      this.store.setError(err instanceof ApiError ? err.message : `unreachable: ${err}`);
      return;
    }
    await this.refresh();
  }

  applyContext(values: Record<string, Record<string, unknown>>) {
    void this.mutate(() => this.api.postContext(values, this.now()));
  }

  useService(service: string) {
    void this.mutate(() => this.api.useService(service, this.now()));
  }

  submitReason(requestId: string, text: string) {
    void this.mutate(async () => {
      const pending = this.store.state?.pending_requests.find(
        (r) => r.request_id === requestId);
      await this.api.submitReason(requestId, text, this.now());
      // validation mode: offer the attribute checklist for accuracy logging
      if (pending) {
        this.validation = { requestId, attributes: pending.snapshot };
      }
    });
  }

  confirmPredicted(requestId: string, index: number) {
    void this.mutate(() => this.api.confirmPredicted(requestId, index, this.now()));
  }

  dismiss(requestId: string) {
    void this.mutate(() => this.api.dismiss(requestId, this.now()));
  }

  reject(service: string) {
    void this.mutate(() => this.api.reject(service, this.now()));
  }

  deleteRule(ruleId: string) {
    void this.mutate(() => this.api.deleteRule(ruleId));
  }

  selectAttributes(requestId: string, triples: [string, string, string][]) {
    void this.mutate(async () => {
      await this.api.selectAttributes(requestId, triples, this.now());
      this.validation = null;
    });
  }

  render() {
    const state = this.store.state;
    this.root.replaceChildren();
    this.root.append(renderBanner(this.store.lastError));
    if (!state) return;
    this.root.append(renderContextPanel(state.snapshot.attributes, this));
    this.root.append(renderServicePanel(this.store.catalog, this));
    this.root.append(renderWidget(state.recommendations, this.store.catalog, this));
    this.root.append(renderLockScreen(state.recommendations, this.store.catalog));
    this.root.append(renderPrompts(state.pending_requests, this));
    if (this.validation) {
      this.root.append(
        renderValidation(this.validation.requestId, this.validation.attributes, this));
    }
    this.root.append(renderRules(state.rules, this));
  }
}

export function mount(root: HTMLElement, baseUrl: string): App {
  const app = new App(root, new ApiClient(baseUrl));
  void app.start();
  return app;
}
