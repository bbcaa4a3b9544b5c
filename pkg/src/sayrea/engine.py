"""Engine orchestration: the in-situ loop from recognition through reason
requests and rule insertion to recommendation refresh.

Every state mutation is journaled as an append-only entry carrying its full
outcome (identified causes, inserted rules, coverage flags), so replaying a
journal from empty state reproduces the exact rule lists and metrics
without touching the completion backend.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import identify as ident
from .catalog import Catalog, ServiceId
from .errors import (
    NotRecommendedError,
    RequestNotFoundError,
    RequestNotPendingError,
    RuleNotFoundError,
    SayReaError,
)
from .recognition import Recognition, ServiceRecognizer, UiEvent
from .recommend import (
    DEFAULT_LIST_SIZE,
    DEFAULT_RECENCY_CAPACITY,
    RecencyLog,
    Recommendation,
    recommend,
)
from .registry import ContextAttribute, ContextSnapshot, Registry, snapshot_diff
from .rules import NEGATIVE, POSITIVE, ContextualRule, RuleStore

REQUEST_TTL_MS = 10 * 60 * 1000
RULE_SNAPSHOT_EVERY = 200


@dataclass
class ReasonRequest:
    request_id: str
    service: ServiceId
    service_semantic: str
    snapshot: ContextSnapshot
    created_at: int
    polarity: str = POSITIVE
    predicted_reasons: list = field(default_factory=list)  # (reason, frozenset[attr])
    state: str = "pending"
    identified: frozenset = frozenset()

    def to_dict(self) -> dict:
        return {
            "request_id": self.request_id,
            "service": str(self.service),
            "service_semantic": self.service_semantic,
            "created_at": self.created_at,
            "polarity": self.polarity,
            "state": self.state,
            "snapshot": [a.to_dict() for a in sorted(self.snapshot.attributes,
                                                     key=lambda x: x.triple())],
            "predicted_reasons": [
                {"reason": r, "cause": sorted(a.triple() for a in cause)}
                for r, cause in self.predicted_reasons
            ],
        }


def _attr_payload(attrs) -> list[dict]:
    return [a.to_dict() for a in sorted(attrs, key=lambda x: x.triple())]


def _attrs_from_payload(items) -> frozenset[ContextAttribute]:
    return frozenset(
        ContextAttribute(d["dimension"], d["feature"], d["value"],
                         d.get("semantic", d["value"]), d.get("color_tag"))
        for d in items
    )


class Engine:
    def __init__(self, registry: Registry, catalog: Catalog, backend=None,
                 data_dir: Optional[str] = None,
                 list_size: int = DEFAULT_LIST_SIZE,
                 recency_capacity: int = DEFAULT_RECENCY_CAPACITY):
        self.registry = registry
        self.catalog = catalog
        self.backend = backend or ident.MockBackend()
        self.list_size = list_size
        self.snapshot = ContextSnapshot(0, frozenset())
        self.store = RuleStore(registry)
        self.recency = RecencyLog(recency_capacity)
        self.recognizer = ServiceRecognizer(catalog)
        self.pending: dict[str, ReasonRequest] = {}
        self.suppressed: set[ServiceId] = set()
        self.journal: list[dict] = []
        self._lock = threading.RLock()
        self._rule_counter = 0
        self._request_counter = 0
        self._now = 0
        self._journal_fh = None
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            journal_path = self.data_dir / "journal.jsonl"
            if journal_path.exists():
                with open(journal_path) as fh:
                    for line in fh:
                        if line.strip():
                            self.apply_entry(json.loads(line))
            self._journal_fh = open(journal_path, "a")

    # -- journal ------------------------------------------------------------

    def _journal_append(self, kind: str, payload: dict, ts: int) -> dict:
        entry = {"v": 1, "seq": len(self.journal) + 1, "ts": ts, "kind": kind,
                 "payload": payload}
        self.journal.append(entry)
        if self._journal_fh is not None:
            self._journal_fh.write(json.dumps(entry, sort_keys=True) + "\n")
            self._journal_fh.flush()
            if entry["seq"] % RULE_SNAPSHOT_EVERY == 0:
                self.write_rule_snapshot()
        return entry

    def write_rule_snapshot(self):
        if self.data_dir:
            (self.data_dir / "rules.jsonl").write_text(self.store.export_jsonl())

    def close(self):
        if self._journal_fh is not None:
            self._journal_fh.close()
            self._journal_fh = None
        self.write_rule_snapshot()

    # -- clock / expiry -----------------------------------------------------

    def _tick(self, timestamp: Optional[int]) -> int:
        # Logical clock: only explicit timestamps advance it, so simulated
        # sessions with small timestamps never collide with wall-clock time.
        ts = self._now if timestamp is None else int(timestamp)
        self._now = max(self._now, ts)
        self._expire(self._now)
        return ts

    def _expire(self, now: int):
        for req in list(self.pending.values()):
            if req.state == "pending" and now - req.created_at > REQUEST_TTL_MS:
                req.state = "expired"
                self._journal_append("request-expired", {"request_id": req.request_id}, now)

    # -- context and events -------------------------------------------------

    def update_context(self, raw_values: dict, timestamp: Optional[int] = None) -> ContextSnapshot:
        """raw_values: {dimension_id: {feature_id: raw value}}."""
        with self._lock:
            ts = self._tick(timestamp)
            attrs = []
            for dim_id, feats in raw_values.items():
                for feat_id, value in feats.items():
                    attrs.append(self.registry.semanticize(dim_id, feat_id, value))
            new_snapshot = self.snapshot.with_attributes(attrs, timestamp=ts)
            self._journal_append(
                "context-update", {"attributes": _attr_payload(new_snapshot.attributes)}, ts)
            self._apply_context(new_snapshot)
            return self.snapshot

    def _apply_context(self, new_snapshot: ContextSnapshot):
        if snapshot_diff(self.snapshot, new_snapshot):
            self.suppressed.clear()  # rejection suppression is per-snapshot
        self.snapshot = new_snapshot

    def ingest_ui_event(self, event: UiEvent) -> list[Recognition]:
        with self._lock:
            ts = self._tick(event.timestamp)
            payload = {"kind": event.kind}
            if event.kind == "page":
                payload["keywords"] = sorted(str(k) for k in event.payload)
            else:
                payload["value"] = str(event.payload)
            self._journal_append("ui-event", payload, ts)
            recognitions = self.recognizer.ingest(event)
            for rec in recognitions:
                self.on_recognition(rec)
            return recognitions

    def flush_recognizer(self, timestamp: Optional[int] = None) -> list[Recognition]:
        with self._lock:
            ts = self._tick(timestamp)
            recognitions = self.recognizer.flush(ts)
            for rec in recognitions:
                self.on_recognition(rec)
            return recognitions

    def inject_usage(self, service: ServiceId, timestamp: Optional[int] = None,
                     semantic: Optional[str] = None) -> Optional[ReasonRequest]:
        """Direct usage injection (simulation path); behaves like a recognition."""
        with self._lock:
            ts = self._tick(timestamp)
            rec = Recognition(service=service, timestamp=ts, matched_distance=0.0,
                              trigger="app-open" if service.service_key == "open"
                              else "labeled-sequence")
            return self.on_recognition(rec, semantic=semantic)

    # -- the in-situ loop ---------------------------------------------------

    def on_recognition(self, rec: Recognition,
                       semantic: Optional[str] = None) -> Optional[ReasonRequest]:
        with self._lock:
            ts = self._tick(rec.timestamp)
            shown = self.recommendations()
            covered = any(r.service == rec.service for r in shown)
            self._journal_append(
                "recommendation-shown", {"services": [str(r.service) for r in shown]}, ts)
            self._journal_append("recognition", {
                "service": str(rec.service),
                "distance": rec.matched_distance,
                "trigger": rec.trigger,
            }, ts)
            self.recency.record(rec.service, ts)
            self._journal_append(
                "usage", {"service": str(rec.service), "covered": covered}, ts)

            # collapse duplicate recognitions at the same instant
            for req in self.pending.values():
                if (req.state == "pending" and req.service == rec.service
                        and req.created_at == ts and req.polarity == POSITIVE):
                    return req
            service_semantic = semantic or self.catalog.semantic_of(rec.service)
            if rec.trigger == "app-open" and semantic is None and rec.app_name:
                service_semantic = rec.app_name
            return self._open_request(rec.service, service_semantic, POSITIVE, ts)

    def _open_request(self, service: ServiceId, semantic: str, polarity: str,
                      ts: int) -> ReasonRequest:
        self._request_counter += 1
        predicted = []
        if polarity == POSITIVE:
            matches = self.store.positive.query(self.snapshot)
            matches.sort(key=lambda m: (-m.depth, m.rule_id))
            seen = set()
            for m in matches:
                if m.reason not in seen:
                    seen.add(m.reason)
                    predicted.append((m.reason, m.cause))
        req = ReasonRequest(
            request_id=f"q{self._request_counter:05d}",
            service=service,
            service_semantic=semantic,
            snapshot=self.snapshot,
            created_at=ts,
            polarity=polarity,
            predicted_reasons=predicted,
        )
        self.pending[req.request_id] = req
        self._journal_append("request-opened", req.to_dict(), ts)
        return req

    def _get_pending(self, request_id: str) -> ReasonRequest:
        req = self.pending.get(request_id)
        if req is None:
            raise RequestNotFoundError(f"no request {request_id!r}")
        if req.state != "pending":
            raise RequestNotPendingError(f"request {request_id} is {req.state}")
        return req

    def submit_reason(self, request_id: str, reason: str,
                      timestamp: Optional[int] = None) -> ContextualRule:
        with self._lock:
            ts = self._tick(timestamp)
            req = self._get_pending(request_id)
            bundle = ident.build_prompt(reason, req.service_semantic, req.snapshot,
                                        self.registry)
            cause = ident.identify(bundle, self.backend, req.snapshot, self.registry)
            # only after a successful identification does the request leave pending
            req.state = "answered"
            req.identified = cause.attributes
            self._journal_append("reason-submitted", {
                "request_id": request_id,
                "reason": reason,
                "identified": _attr_payload(cause.attributes),
                "backend": cause.backend,
                "duration_ms": max(0, ts - req.created_at),
            }, ts)
            rule = self._new_rule(cause.attributes, req.service, req.polarity, reason,
                                  "feedback" if req.polarity == NEGATIVE else "user-reason", ts)
            return rule

    def confirm_predicted(self, request_id: str, index: int,
                          timestamp: Optional[int] = None) -> ContextualRule:
        with self._lock:
            ts = self._tick(timestamp)
            req = self._get_pending(request_id)
            if not 0 <= index < len(req.predicted_reasons):
                raise IndexError(f"predicted reason index {index} out of range")
            reason, cause = req.predicted_reasons[index]
            req.state = "confirmed"
            req.identified = frozenset(cause)
            self._journal_append("reason-submitted", {
                "request_id": request_id,
                "reason": reason,
                "identified": _attr_payload(cause),
                "backend": "predicted",
                "duration_ms": max(0, ts - req.created_at),
            }, ts)
            return self._new_rule(frozenset(cause), req.service, req.polarity, reason,
                                  "predicted-reason-confirm", ts)

    def dismiss(self, request_id: str, timestamp: Optional[int] = None):
        with self._lock:
            ts = self._tick(timestamp)
            req = self._get_pending(request_id)
            req.state = "dismissed"
            self._journal_append("request-dismissed", {"request_id": request_id}, ts)

    def select_attributes(self, request_id: str, triples,
                          timestamp: Optional[int] = None) -> dict:
        """Validation step: the user's own attribute choice, logged for the
        identification-accuracy metric."""
        with self._lock:
            ts = self._tick(timestamp)
            req = self.pending.get(request_id)
            if req is None:
                raise RequestNotFoundError(f"no request {request_id!r}")
            chosen = {tuple(t) for t in triples}
            predicted = {tuple(a.triple()) for a in req.identified}
            ratio, accurate = ident.overlap_accuracy(chosen, predicted)
            self._journal_append("select-attributes", {
                "request_id": request_id,
                "chosen": sorted(list(t) for t in chosen),
                "ratio": ratio,
                "accurate": accurate,
                "duration_ms": max(0, ts - req.created_at),
            }, ts)
            return {"ratio": ratio, "accurate": accurate}

    def _new_rule(self, cause, service: ServiceId, polarity: str, reason: str,
                  origin: str, ts: int) -> ContextualRule:
        self._rule_counter += 1
        rule = ContextualRule(
            rule_id=f"r{self._rule_counter:05d}",
            cause=frozenset(cause),
            service=service,
            polarity=polarity,
            reason=reason,
            created_at=ts,
            origin=origin,
        )
        outcome = self.store.insert(rule)
        if outcome == "duplicate":
            self._rule_counter -= 1
            existing = next(r for r in self.store.tree_for(polarity).rules()
                            if r.cause == rule.cause and r.service == service)
            self._journal_append("rule-duplicate", {"rule_id": existing.rule_id}, ts)
            return existing
        self._journal_append("rule-inserted", rule.to_dict(), ts)
        return rule

    # -- recommendation surface ---------------------------------------------

    def recommendations(self, k: Optional[int] = None) -> list[Recommendation]:
        with self._lock:
            recs = recommend(self.snapshot, self.store.positive, self.store.negative,
                             self.recency, k or self.list_size)
            return [r for r in recs if r.service not in self.suppressed]

    def reject(self, service: ServiceId, timestamp: Optional[int] = None) -> ReasonRequest:
        with self._lock:
            ts = self._tick(timestamp)
            if not any(r.service == service for r in self.recommendations()):
                raise NotRecommendedError(f"{service} is not currently recommended")
            self.suppressed.add(service)
            self._journal_append("rejection", {"service": str(service)}, ts)
            return self._open_request(service, self.catalog.semantic_of(service),
                                     NEGATIVE, ts)

    def record_usage(self, service: ServiceId, timestamp: Optional[int] = None):
        with self._lock:
            ts = self._tick(timestamp)
            self.recency.record(service, ts)
            self._journal_append("usage", {"service": str(service), "covered": False}, ts)

    def delete_rule(self, rule_id: str, timestamp: Optional[int] = None):
        with self._lock:
            ts = self._tick(timestamp)
            self.store.get(rule_id)  # raises RuleNotFoundError
            self.store.delete(rule_id)
            self._journal_append("rule-deleted", {"rule_id": rule_id}, ts)

    # -- exports -------------------------------------------------------------

    def export_rules(self) -> str:
        with self._lock:
            return self.store.export_jsonl()

    def metrics(self, tz_offset_minutes: int = 0) -> dict:
        with self._lock:
            return compute_metrics(self.journal, tz_offset_minutes)

    def state_dict(self) -> dict:
        with self._lock:
            return {
                "v": 1,
                "snapshot": {
                    "timestamp": self.snapshot.timestamp,
                    "attributes": _attr_payload(self.snapshot.attributes),
                },
                "recommendations": [r.to_dict() for r in self.recommendations()],
                "pending_requests": [
                    req.to_dict() for req in self.pending.values() if req.state == "pending"
                ],
                "rules": [r.to_dict() for r in self.store.all_rules()],
                "recency": self.recency.to_list(),
                "metrics": self.metrics(),
                "backend": getattr(self.backend, "name", "unknown"),
            }

    # -- event-sourced replay ------------------------------------------------

    def apply_entry(self, entry: dict):
        """Fold one journal entry into state; never calls the backend."""
        kind, payload, ts = entry["kind"], entry["payload"], entry["ts"]
        self._now = max(self._now, ts)
        self.journal.append(entry)
        if kind == "context-update":
            self._apply_context(ContextSnapshot(ts, _attrs_from_payload(payload["attributes"])))
        elif kind == "usage":
            self.recency.record(ServiceId.parse(payload["service"]), ts)
        elif kind == "request-opened":
            req = ReasonRequest(
                request_id=payload["request_id"],
                service=ServiceId.parse(payload["service"]),
                service_semantic=payload["service_semantic"],
                snapshot=ContextSnapshot(ts, _attrs_from_payload(payload["snapshot"])),
                created_at=payload["created_at"],
                polarity=payload["polarity"],
                predicted_reasons=[
                    (p["reason"], _attrs_from_triples(p["cause"]))
                    for p in payload["predicted_reasons"]
                ],
            )
            self.pending[req.request_id] = req
            self._request_counter = max(self._request_counter,
                                        int(req.request_id.lstrip("q") or 0))
        elif kind == "reason-submitted":
            req = self.pending.get(payload["request_id"])
            if req is not None:
                req.state = "confirmed" if payload["backend"] == "predicted" else "answered"
                req.identified = _attrs_from_payload(payload["identified"])
        elif kind == "rule-inserted":
            rule = ContextualRule.from_dict(payload)
            self.store.insert(rule)
            self._rule_counter = max(self._rule_counter, int(rule.rule_id.lstrip("r") or 0))
        elif kind == "rule-deleted":
            self.store.delete(payload["rule_id"])
        elif kind == "rejection":
            self.suppressed.add(ServiceId.parse(payload["service"]))
        elif kind == "request-dismissed":
            req = self.pending.get(payload["request_id"])
            if req is not None:
                req.state = "dismissed"
        elif kind == "request-expired":
            req = self.pending.get(payload["request_id"])
            if req is not None:
                req.state = "expired"
        # recognition / recommendation-shown / ui-event / select-attributes
        # entries are informational for replay; metrics read them directly.

    @classmethod
    def replay_journal(cls, registry: Registry, catalog: Catalog, entries) -> "Engine":
        engine = cls(registry, catalog)
        for entry in entries:
            engine.apply_entry(entry)
        return engine


def _attrs_from_triples(triples) -> frozenset[ContextAttribute]:
    return frozenset(ContextAttribute(d, f, v, v) for d, f, v in (tuple(t) for t in triples))


def day_index(ts_ms: int, tz_offset_minutes: int = 0) -> int:
    return (ts_ms // 1000 + tz_offset_minutes * 60) // 86400


def compute_metrics(journal, tz_offset_minutes: int = 0) -> dict:
    """Single authoritative metrics fold over journal entries."""
    n_a = n_c = 0
    usage_days: dict[int, list[int]] = {}
    rule_events: list[tuple[int, int]] = []  # (day, delta)
    accurate_flags: list[bool] = []
    extraction_ms: list[int] = []
    selection_ms: list[int] = []
    for entry in journal:
        kind, payload = entry["kind"], entry["payload"]
        day = day_index(entry["ts"], tz_offset_minutes)
        if kind == "usage":
            n_a += 1
            covered = 1 if payload["covered"] else 0
            n_c += covered
            usage_days.setdefault(day, []).append(covered)
        elif kind == "rule-inserted":
            rule_events.append((day, 1))
        elif kind == "rule-deleted":
            rule_events.append((day, -1))
        elif kind == "select-attributes":
            accurate_flags.append(bool(payload["accurate"]))
            selection_ms.append(int(payload["duration_ms"]))
        elif kind == "reason-submitted":
            extraction_ms.append(int(payload["duration_ms"]))

    days = sorted(set(usage_days) | {d for d, _ in rule_events})
    if days:
        day_span = list(range(days[0], days[-1] + 1))
    else:
        day_span = []
    coverage_by_day = []
    usages_by_day = []
    covered_by_day = []
    for day in day_span:
        flags = usage_days.get(day, [])
        usages_by_day.append(len(flags))
        covered_by_day.append(sum(flags))
        coverage_by_day.append(round(sum(flags) / len(flags), 6) if flags else 0.0)
    rules_by_day = []
    total = 0
    deltas: dict[int, int] = {}
    for day, delta in rule_events:
        deltas[day] = deltas.get(day, 0) + delta
    for day in day_span:
        total += deltas.get(day, 0)
        rules_by_day.append(total)

    return {
        "v": 1,
        "totals": {"N_a": n_a, "N_c": n_c},
        "coverage": round(n_c / n_a, 6) if n_a else 0.0,
        "coverage_by_day": coverage_by_day,
        "usages_by_day": usages_by_day,
        "covered_by_day": covered_by_day,
        "rules_by_day": rules_by_day,
        "days": day_span,
        "accuracy": (round(sum(accurate_flags) / len(accurate_flags), 6)
                     if accurate_flags else None),
        "accuracy_samples": len(accurate_flags),
        "mean_extraction_seconds": (round(sum(extraction_ms) / len(extraction_ms) / 1000.0, 6)
                                    if extraction_ms else None),
        "mean_extraction_with_selection_seconds": (
            round(sum(selection_ms) / len(selection_ms) / 1000.0, 6)
            if selection_ms else None),
    }
