export interface AttributeView {
  dimension: string;
  feature: string;
  value: string;
  semantic: string;
  color_tag?: string | null;
}

export interface RecommendationView {
  service: string;
  reason: string | null;
  source: "rule" | "recency";
  occurrences: number;
  max_depth: number;
}

export interface PredictedReasonView {
  reason: string;
  cause: [string, string, string][];
}

export interface RequestView {
  request_id: string;
  service: string;
  service_semantic: string;
  created_at: number;
  polarity: "positive" | "negative";
  state: string;
  snapshot: AttributeView[];
  predicted_reasons: PredictedReasonView[];
}

export interface RuleView {
  rule_id: string;
  cause: [string, string, string][];
  cause_semantics?: Record<string, string>;
  service: string;
  polarity: "positive" | "negative";
  reason: string;
  created_at: number;
  origin: string;
}

export interface StateView {
  v: number;
  snapshot: { timestamp: number; attributes: AttributeView[] };
  recommendations: RecommendationView[];
  pending_requests: RequestView[];
  rules: RuleView[];
  recency: { service: string; ts: number }[] | string[];
  metrics: Record<string, unknown>;
  backend: string;
}

export interface CatalogServiceView {
  service_key: string;
  semantic: string;
}

export interface CatalogAppView {
  app_id: string;
  app_name: string;
  services: CatalogServiceView[];
}

export interface CatalogView {
  v: number;
  apps: CatalogAppView[];
}
