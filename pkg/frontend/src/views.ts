import type {
  AttributeView,
  CatalogView,
  RecommendationView,
  RequestView,
  RuleView,
} from "./types.js";

export interface Handlers {
  applyContext(values: Record<string, Record<string, unknown>>): void;
  useService(service: string): void;
  submitReason(requestId: string, text: string): void;
  confirmPredicted(requestId: string, index: number): void;
  dismiss(requestId: string): void;
  reject(service: string): void;
  deleteRule(ruleId: string): void;
  selectAttributes(requestId: string, triples: [string, string, string][]): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function serviceLabel(service: string, catalog: CatalogView | null): string {
  const [appId, key] = service.split("/");
  const app = catalog?.apps.find((a) => a.app_id === appId);
  if (!app) return service;
  if (key === "open") return app.app_name;
  const svc = app.services.find((s) => s.service_key === key);
  return svc ? svc.semantic : service;
}

function serviceIcon(service: string, catalog: CatalogView | null): HTMLElement {
  const label = serviceLabel(service, catalog);
  return el("span", "icon", label.charAt(0).toUpperCase());
}

export function renderBanner(message: string | null): HTMLElement {
  const banner = el("div", "banner");
  if (message) {
    banner.classList.add("banner-error");
    banner.append(el("span", "banner-text", message));
    const retry = el("button", "banner-retry", "Retry");
    retry.dataset.action = "retry";
    banner.append(retry);
  }
  return banner;
}

export function renderContextPanel(
  attributes: AttributeView[],
  handlers: Handlers,
): HTMLElement {
  const panel = el("section", "context-panel");
  panel.append(el("h2", undefined, "Context"));

  const form = el("div", "context-form");
  const mk = (name: string, input: HTMLElement, label: string) => {
    const row = el("label", "context-row");
    row.append(el("span", undefined, label), input);
    input.setAttribute("name", name);
    form.append(row);
  };
  const temp = el("input") as HTMLInputElement;
  temp.type = "range";
  temp.min = "-10";
  temp.max = "40";
  temp.value = "20";
  mk("temperature", temp, "Temperature (°C)");
  const hour = el("input") as HTMLInputElement;
  hour.type = "range";
  hour.min = "0";
  hour.max = "24";
  hour.value = "12";
  mk("hour", hour, "Hour of day");
  const select = (name: string, label: string, options: string[]) => {
    const sel = el("select") as HTMLSelectElement;
    for (const opt of options) {
      const o = el("option", undefined, opt) as HTMLOptionElement;
      o.value = opt;
      sel.append(o);
    }
    mk(name, sel, label);
    return sel;
  };
  select("day_of_week", "Day of week",
    ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]);
  select("location_tag", "Location", ["home", "office", "dorm", "gym", "outside"]);
  select("activity", "Activity", ["stilling", "walking", "running", "riding", "on_vehicle"]);

  const apply = el("button", "apply-context", "Apply context");
  apply.addEventListener("click", () => {
    const read = (name: string) =>
      (form.querySelector(`[name=${name}]`) as HTMLInputElement | HTMLSelectElement).value;
    handlers.applyContext({
      Weather: { temperature: Number(read("temperature")) },
      Time: {
        o_clock: Number(read("hour")),
        time_period: Number(read("hour")),
        day_of_week: read("day_of_week"),
      },
      Location: { location_tag: read("location_tag") },
      Activities: { activity: read("activity") },
    });
  });
  form.append(apply);
  panel.append(form);

  const chips = el("div", "attribute-chips");
  for (const attr of attributes) {
    const chip = el("span", "chip attr-chip", attr.semantic);
    chip.title = `${attr.dimension}/${attr.feature}=${attr.value}`;
    if (attr.color_tag) chip.style.backgroundColor = attr.color_tag;
    chips.append(chip);
  }
  panel.append(chips);
  return panel;
}

export function renderServicePanel(
  catalog: CatalogView | null,
  handlers: Handlers,
): HTMLElement {
  const panel = el("section", "service-panel");
  panel.append(el("h2", undefined, "Use a service"));
  if (!catalog) return panel;
  for (const app of catalog.apps) {
    const group = el("div", "app-group");
    group.append(el("h3", undefined, app.app_name));
    const mkButton = (service: string, label: string) => {
      const btn = el("button", "use-service", label);
      btn.dataset.service = service;
      btn.addEventListener("click", () => handlers.useService(service));
      group.append(btn);
    };
    mkButton(`${app.app_id}/open`, `open ${app.app_name}`);
    for (const svc of app.services) {
      mkButton(`${app.app_id}/${svc.service_key}`, svc.semantic);
    }
    panel.append(group);
  }
  return panel;
}

/** Home-screen widget: icon, label, reason, reject button. */
export function renderWidget(
  recommendations: RecommendationView[],
  catalog: CatalogView | null,
  handlers: Handlers,
): HTMLElement {
  const widget = el("section", "widget");
  widget.append(el("h2", undefined, "Widget"));
  for (const rec of recommendations) {
    const item = el("div", "widget-item");
    item.dataset.service = rec.service;
    item.append(serviceIcon(rec.service, catalog));
    item.append(el("span", "label", serviceLabel(rec.service, catalog)));
    item.append(el("span", "reason", rec.reason ?? "recently used"));
    const reject = el("button", "reject", "×");
    reject.title = "not now";
    reject.addEventListener("click", () => handlers.reject(rec.service));
    item.append(reject);
    widget.append(item);
  }
  return widget;
}

/** Lock-screen grid: icon and label only — no reasons. */
export function renderLockScreen(
  recommendations: RecommendationView[],
  catalog: CatalogView | null,
): HTMLElement {
  const grid = el("section", "lock-grid");
  grid.append(el("h2", undefined, "Lock screen"));
  for (const rec of recommendations) {
    const item = el("div", "lock-item");
    item.dataset.service = rec.service;
    item.append(serviceIcon(rec.service, catalog));
    item.append(el("span", "label", serviceLabel(rec.service, catalog)));
    grid.append(item);
  }
  return grid;
}

/** Non-modal reason prompts (toast area): current interaction is never blocked. */
export function renderPrompts(
  requests: RequestView[],
  handlers: Handlers,
): HTMLElement {
  const area = el("section", "prompts");
  for (const req of requests) {
    const prompt = el("div", "prompt");
    prompt.dataset.requestId = req.request_id;
    prompt.dataset.polarity = req.polarity;
    const question =
      req.polarity === "negative"
        ? `Why not "${req.service_semantic}" right now?`
        : `Why did you use "${req.service_semantic}"?`;
    prompt.append(el("div", "prompt-question", question));

    const chips = el("div", "predicted-chips");
    req.predicted_reasons.forEach((pred, index) => {
      const chip = el("button", "chip predicted-chip", pred.reason);
      chip.dataset.index = String(index);
      chip.addEventListener("click", () =>
        handlers.confirmPredicted(req.request_id, index));
      chips.append(chip);
    });
    prompt.append(chips);

    const input = el("input", "reason-input") as HTMLInputElement;
    input.placeholder = "say the reason…";
    const submit = el("button", "submit-reason", "Submit");
    submit.addEventListener("click", () =>
      handlers.submitReason(req.request_id, input.value));
    const dismiss = el("button", "dismiss", "Dismiss");
    dismiss.addEventListener("click", () => handlers.dismiss(req.request_id));
    prompt.append(input, submit, dismiss);
    area.append(prompt);
  }
  return area;
}

/** Validation checklist shown after a reason was submitted (accuracy logging). */
export function renderValidation(
  requestId: string,
  attributes: AttributeView[],
  handlers: Handlers,
): HTMLElement {
  const panel = el("section", "validation");
  panel.dataset.requestId = requestId;
  panel.append(el("div", undefined, "Which attributes were the actual reason?"));
  const boxes: [HTMLInputElement, AttributeView][] = [];
  for (const attr of attributes) {
    const row = el("label", "validation-row");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    row.append(box, el("span", undefined, attr.semantic));
    boxes.push([box, attr]);
    panel.append(row);
  }
  const confirm = el("button", "confirm-selection", "Confirm selection");
  confirm.addEventListener("click", () => {
    const triples = boxes
      .filter(([box]) => box.checked)
      .map(([, a]) => [a.dimension, a.feature, a.value] as [string, string, string]);
    handlers.selectAttributes(requestId, triples);
  });
  panel.append(confirm);
  return panel;
}

export function renderRules(rules: RuleView[], handlers: Handlers): HTMLElement {
  const section = el("section", "rules");
  section.append(el("h2", undefined, "Rules"));
  const table = el("table", "rules-table");
  for (const rule of rules) {
    const row = el("tr", `rule-row polarity-${rule.polarity}`);
    row.dataset.ruleId = rule.rule_id;
    const causeCell = el("td", "cause");
    const semantics = rule.cause_semantics
      ? Object.values(rule.cause_semantics)
      : rule.cause.map((c) => c.join("="));
    for (const text of semantics) causeCell.append(el("span", "chip cause-chip", text));
    row.append(causeCell);
    row.append(el("td", "service", rule.service));
    row.append(el("td", "reason", rule.reason));
    row.append(el("td", "polarity", rule.polarity));
    const actions = el("td", "actions");
    const del = el("button", "delete-rule", "Delete");
    del.addEventListener("click", () => handlers.deleteRule(rule.rule_id));
    actions.append(del);
    row.append(actions);
    table.append(row);
  }
  section.append(table);
  return section;
}
