"""Trace replay and synthetic-trace generation.

A trace is a JSON-lines file, one chronological event per line. Replay
drives a fresh engine (mock backend by default) through the events and
reports coverage over time, rule accumulation, identification accuracy,
and extraction timing.
"""

from __future__ import annotations

import csv
import json
import random
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .catalog import Catalog, ServiceId
from .engine import Engine
from .errors import (
    NoAttributesIdentifiedError,
    NotRecommendedError,
    TraceOrderError,
    TraceParseError,
)
from .identify import MockBackend
from .recognition import UiEvent
from .registry import Registry

TRACE_KINDS = {
    "context", "ui-event", "usage", "reason", "select-attributes",
    "confirm-predicted", "reject", "delete-rule",
}


def parse_trace(path) -> list[dict]:
    events = []
    last_ts = None
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                ev = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TraceParseError(str(exc), line_no)
            if not isinstance(ev, dict) or "ts" not in ev or "kind" not in ev:
                raise TraceParseError("event needs 'ts' and 'kind'", line_no)
            if ev["kind"] not in TRACE_KINDS:
                raise TraceParseError(f"unknown kind {ev['kind']!r}", line_no)
            if last_ts is not None and ev["ts"] < last_ts:
                raise TraceOrderError(f"line {line_no}: timestamp moves backwards")
            last_ts = ev["ts"]
            events.append(ev)
    return events


class TraceRunner:
    def __init__(self, registry: Registry, catalog: Catalog, backend=None,
                 list_size: int = 6, data_dir=None):
        self.engine = Engine(registry, catalog, backend or MockBackend(),
                             data_dir=data_dir, list_size=list_size)
        # service -> request id, for events that reference "the preceding usage"
        self._last_request: dict[str, str] = {}
        self._last_negative: dict[str, str] = {}
        self.skipped: list[str] = []

    def apply(self, ev: dict):
        kind, ts = ev["kind"], int(ev["ts"])
        if kind == "context":
            self.engine.update_context(ev["values"], ts)
        elif kind == "ui-event":
            body = ev["event"]
            payload = frozenset(body["keywords"]) if body["kind"] == "page" else body["value"]
            self.engine.ingest_ui_event(UiEvent(ts, body["kind"], payload))
        elif kind == "usage":
            req = self.engine.inject_usage(ServiceId.parse(ev["service"]), ts,
                                           semantic=ev.get("semantic"))
            if req is not None:
                self._last_request[ev["service"]] = req.request_id
        elif kind == "reason":
            self._submit(ev["service"], ev["text"], ts, negative=False)
        elif kind == "select-attributes":
            rid = self._last_request.get(ev["service"])
            if rid is None:
                self.skipped.append(f"select-attributes without request for {ev['service']}")
                return
            self.engine.select_attributes(rid, ev["attributes"], ts)
        elif kind == "confirm-predicted":
            rid = self._last_request.get(ev["service"])
            req = self.engine.pending.get(rid) if rid else None
            if req is None or req.state != "pending" or not req.predicted_reasons:
                self.skipped.append(f"confirm-predicted not applicable for {ev['service']}")
                return
            index = min(int(ev.get("index", 0)), len(req.predicted_reasons) - 1)
            self.engine.confirm_predicted(rid, index, ts)
        elif kind == "reject":
            try:
                req = self.engine.reject(ServiceId.parse(ev["service"]), ts)
            except NotRecommendedError:
                self.skipped.append(f"reject skipped, {ev['service']} not recommended")
                return
            self._last_negative[ev["service"]] = req.request_id
            if ev.get("text"):
                try:
                    self.engine.submit_reason(req.request_id, ev["text"], ts)
                except NoAttributesIdentifiedError:
                    self.engine.dismiss(req.request_id, ts)
            else:
                self.engine.dismiss(req.request_id, ts)
        elif kind == "delete-rule":
            self.engine.delete_rule(ev["rule_id"], ts)

    def _submit(self, service: str, text: str, ts: int, negative: bool):
        rid = self._last_request.get(service)
        req = self.engine.pending.get(rid) if rid else None
        if req is None or req.state != "pending":
            self.skipped.append(f"reason without pending request for {service}")
            return
        try:
            self.engine.submit_reason(rid, text, ts)
        except NoAttributesIdentifiedError:
            self.skipped.append(f"no attributes identified for reason {text!r}")


def replay(trace_path, registry: Optional[Registry] = None,
           catalog: Optional[Catalog] = None, backend=None,
           out_dir=None, list_size: int = 6, tz_offset_minutes: int = 0) -> dict:
    registry = registry or Registry.load()
    catalog = catalog or Catalog.load()
    events = parse_trace(trace_path)
    runner = TraceRunner(registry, catalog, backend)
    for ev in events:
        runner.apply(ev)
    if events:
        runner.engine.flush_recognizer(events[-1]["ts"])
    metrics = runner.engine.metrics(tz_offset_minutes)
    if out_dir is not None:
        write_outputs(Path(out_dir), runner.engine, metrics)
    return {"metrics": metrics, "engine": runner.engine, "skipped": runner.skipped}


def write_outputs(out_dir: Path, engine: Engine, metrics: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.json").write_text(json.dumps(metrics, sort_keys=True, indent=2) + "\n")
    (out_dir / "rules.jsonl").write_text(engine.export_rules())
    with open(out_dir / "journal.jsonl", "w") as fh:
        for entry in engine.journal:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
    with open(out_dir / "daily.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "usages", "covered", "coverage", "rules_cumulative"])
        for i, day in enumerate(metrics["days"]):
            writer.writerow([
                day,
                metrics["usages_by_day"][i],
                metrics["covered_by_day"][i],
                metrics["coverage_by_day"][i],
                metrics["rules_by_day"][i],
            ])


# ---------------------------------------------------------------------------
# synthetic trace generation

WEEKDAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]

# Monday 2024-01-01 00:00 UTC
BASE_MS = 1704067200000

_PERIOD_WORDS = {
    "deep-night": "sleep", "early-morning": "morning", "morning": "morning",
    "afternoon": "afternoon", "evening": "evening", "night": "night",
}


def _period_word(hour: int) -> str:
    if hour < 5 or hour >= 24:
        return "sleep"
    if hour < 12:
        return "morning"
    if hour < 18:
        return "afternoon"
    if hour < 22:
        return "evening"
    return "night"


def default_profile() -> dict:
    return {
        "v": 1,
        "habits": [
            {"service": "com.demo.clock/set_alarm", "hours": [7, 23]},
            {"service": "com.demo.news/read_briefing", "hours": [8, 20]},
            {"service": "com.demo.music/play_playlist", "hours": [10, 19]},
            {"service": "com.demo.maps/navigate_home", "hours": [9, 18]},
            {"service": "com.demo.pay/show_payment_code", "hours": [12, 21]},
        ],
        "places": ["home", "office", "dorm"],
        "noise_services": [
            "com.game.puzzler/open", "com.social.feed/open", "com.video.shorts/open",
            "com.shop.deals/open", "com.photo.editor/open", "com.fit.tracker/open",
            "com.mail.inbox/open", "com.read.books/open", "com.bank.app/open",
            "com.travel.planner/open", "com.food.delivery/open", "com.weather.radar/open",
        ],
        "noise_per_day": 6,
        "compliance": 0.8,
        "reject_rate": 0.08,
    }


def gen_trace(profile: Optional[dict], days: int, seed: int, out_path=None) -> list[dict]:
    """Deterministic habit-driven trace: habitual (context -> service) pairs
    with noise usages and a configurable reason-compliance rate."""
    if days < 1:
        raise ValueError("days must be >= 1")
    profile = profile or default_profile()
    rng = random.Random(seed)
    habits = profile["habits"]
    places = profile.get("places", ["home"])
    noise = profile.get("noise_services", [])
    noise_per_day = int(profile.get("noise_per_day", 0))
    compliance = float(profile.get("compliance", 1.0))
    reject_rate = float(profile.get("reject_rate", 0.0))

    events: list[dict] = []
    for day in range(1, days + 1):
        day_ms = BASE_MS + (day - 1) * 86400000
        place = places[(day - 1) % len(places)] if places else "home"
        weekday = WEEKDAYS[(day - 1) % 7]
        sessions = []
        for habit in habits:
            for hour in habit["hours"]:
                sessions.append((hour, "habit", habit))
        for _ in range(noise_per_day):
            hour = rng.randint(8, 23)
            sessions.append((hour, "noise", rng.choice(noise)))
        sessions.sort(key=lambda s: (s[0], s[1]))

        for hour, kind, body in sessions:
            ts = day_ms + hour * 3600000 + rng.randint(0, 1800) * 1000
            if kind == "noise":
                events.append({
                    "ts": ts, "kind": "context",
                    "values": _context_values(weekday, hour, place),
                })
                events.append({"ts": ts + 1000, "kind": "usage", "service": body})
                if rng.random() < reject_rate:
                    events.append({
                        "ts": ts + 4000, "kind": "reject", "service": body,
                        "text": f"never need this in the {_period_word(hour)} at {place}",
                    })
                continue
            habit = body
            events.append({
                "ts": ts, "kind": "context",
                "values": _context_values(weekday, hour, place),
            })
            events.append({"ts": ts + 1000, "kind": "usage", "service": habit["service"]})
            if day == 1:
                # novelty day: the user immediately re-uses each service twice
                events.append({"ts": ts + 30000, "kind": "usage",
                               "service": habit["service"]})
                events.append({"ts": ts + 60000, "kind": "usage",
                               "service": habit["service"]})
            if rng.random() < compliance:
                reason = f"usually {_period_word(hour)} at {place}"
                events.append({"ts": ts + 8000, "kind": "reason",
                               "service": habit["service"], "text": reason})
                chosen = [
                    ["Time", "time_period", _band_for_hour(hour)],
                    ["Location", "location_tag", place],
                ]
                if rng.random() < 0.2:
                    chosen.append(["Time", "day_of_week", weekday])
                events.append({"ts": ts + 15000, "kind": "select-attributes",
                               "service": habit["service"], "attributes": chosen})
        # keep timestamps sorted within the day after random offsets
        events.sort(key=lambda e: e["ts"])

    if out_path is not None:
        with open(out_path, "w") as fh:
            for ev in events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
    return events


def _band_for_hour(hour: int) -> str:
    for label, lo, hi in [
        ("deep-night", 0, 5), ("early-morning", 5, 9), ("morning", 9, 12),
        ("afternoon", 12, 18), ("evening", 18, 22), ("night", 22, 24),
        ("deep-night", 24, 25),
    ]:
        if lo <= hour < hi:
            return label
    raise ValueError(f"hour {hour} out of range")


def _context_values(weekday: str, hour: int, place: str) -> dict:
    return {
        "Time": {"day_of_week": weekday, "time_period": hour, "o_clock": hour},
        "Location": {"location_tag": place},
        "Weather": {"weather_type": "clear", "temperature": 18},
        "Activities": {"activity": "stilling"},
    }


def utc_date(day_idx: int) -> str:
    return datetime.fromtimestamp(day_idx * 86400, tz=timezone.utc).strftime("%Y-%m-%d")
