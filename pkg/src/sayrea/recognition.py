"""Service recognition from page/action/app-open event streams.

Pages are recognized when at least 80% of a labeled page's keywords appear
in the runtime keyword set. Recognized page ids and action keywords feed
two sliding windows; a labeled service is recognized when the free-deletion
edit distance between each of its labeled sequences and the corresponding
window is below 1.5.

Exact matches (distance 0) emit immediately. A near-match within the
cutoff is held as a pending candidate and emitted once further events stop
improving it (or on flush), so a fully executed service yields one
recognition at distance 0 rather than an early partial hit.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .catalog import Catalog, PageLabel, ServiceId, ServiceLabel, _norm_keyword

DISTANCE_CUTOFF = 1.5
PAGE_WINDOW_LEN = 10
ACTION_WINDOW_LEN = 20
WINDOW_MAX_AGE_MS = 5 * 60 * 1000


@dataclass(frozen=True)
class UiEvent:
    timestamp: int
    kind: str  # page | action | app-open
    payload: object  # keyword set | action keyword | app_id

    def __post_init__(self):
        if self.kind not in ("page", "action", "app-open"):
            raise ValueError(f"unknown event kind {self.kind!r}")
        if not self.payload:
            raise ValueError("event payload must be non-empty")


@dataclass(frozen=True)
class Recognition:
    service: ServiceId
    timestamp: int
    matched_distance: float
    trigger: str  # labeled-sequence | app-open
    app_name: str = ""


def match_page(runtime_keywords, label: PageLabel) -> bool:
    """True when >= 80% of the label's keywords appear at runtime."""
    runtime = {_norm_keyword(k) for k in runtime_keywords}
    hits = len(label.keywords & runtime)
    return hits / len(label.keywords) >= 0.8


def window_distance(window_tokens, label_seq) -> int:
    return kernels.window_distance(window_tokens, label_seq)


class SlidingWindow:
    def __init__(self, max_len: int, max_age_ms: int = WINDOW_MAX_AGE_MS):
        self.max_len = max_len
        self.max_age_ms = max_age_ms
        self.entries: list[tuple[int, str]] = []

    def append(self, timestamp: int, token: str):
        self.entries.append((timestamp, token))
        self.evict(timestamp)

    def evict(self, now: int):
        cutoff = now - self.max_age_ms
        self.entries = [e for e in self.entries if e[0] >= cutoff][-self.max_len:]

    def tokens(self) -> list[str]:
        return [tok for _, tok in self.entries]

    def consume(self, tokens: set[str]):
        self.entries = [e for e in self.entries if e[1] not in tokens]


class ServiceRecognizer:
    """Per-session recognizer; events must arrive in timestamp order."""

    def __init__(self, catalog: Catalog,
                 page_window_len: int = PAGE_WINDOW_LEN,
                 action_window_len: int = ACTION_WINDOW_LEN,
                 max_age_ms: int = WINDOW_MAX_AGE_MS):
        self.catalog = catalog
        self.pages = SlidingWindow(page_window_len, max_age_ms)
        self.actions = SlidingWindow(action_window_len, max_age_ms)
        # service id -> (total distance, worst distance) for held near-matches
        self._pending: dict[ServiceId, tuple[int, int]] = {}

    def ingest(self, event: UiEvent) -> list[Recognition]:
        if event.kind == "app-open":
            app_id = str(event.payload)
            return [Recognition(
                service=ServiceId(app_id, "open"),
                timestamp=event.timestamp,
                matched_distance=0.0,
                trigger="app-open",
                app_name=self.catalog.app_name(app_id),
            )]
        self.pages.evict(event.timestamp)
        self.actions.evict(event.timestamp)
        if event.kind == "page":
            matched_ids = []
            for service in self.catalog.in_app_services():
                for page in service.pages:
                    if match_page(event.payload, page) and page.page_id not in matched_ids:
                        matched_ids.append(page.page_id)
            for page_id in matched_ids:
                self.pages.append(event.timestamp, page_id)
        else:
            self.actions.append(event.timestamp, _norm_keyword(str(event.payload)))
        return self._scan(event.timestamp)

    def flush(self, timestamp: int) -> list[Recognition]:
        """Emit any held near-matches (end of stream / session idle)."""
        out = []
        for sid, (_, worst) in sorted(self._pending.items(), key=lambda kv: str(kv[0])):
            service = self.catalog.service(sid)
            out.append(self._emit(service, timestamp, worst))
        self._pending.clear()
        return out

    def _scan(self, timestamp: int) -> list[Recognition]:
        out = []
        for service in self.catalog.in_app_services():
            distances = self._service_distances(service)
            if distances is None:
                continue
            if all(d < DISTANCE_CUTOFF for d in distances):
                total, worst = sum(distances), max(distances)
                if worst == 0:
                    self._pending.pop(service.id, None)
                    out.append(self._emit(service, timestamp, 0))
                    continue
                held = self._pending.get(service.id)
                if held is None or total < held[0]:
                    self._pending[service.id] = (total, worst)
                else:
                    # stopped improving: accept the near-match
                    self._pending.pop(service.id, None)
                    out.append(self._emit(service, timestamp, held[1]))
            elif service.id in self._pending:
                _, worst = self._pending.pop(service.id)
                out.append(self._emit(service, timestamp, worst))
        return out

    def _emit(self, service: ServiceLabel, timestamp: int, distance: int) -> Recognition:
        self._consume(service)
        return Recognition(
            service=service.id,
            timestamp=timestamp,
            matched_distance=float(distance),
            trigger="labeled-sequence",
        )

    def _service_distances(self, service: ServiceLabel):
        """Page and action distances; each must pass the cutoff independently."""
        distances = []
        if service.page_sequences:
            distances.append(kernels.batch_min_distance(self.pages.tokens(), service.page_sequences))
        if service.action_sequences:
            distances.append(
                kernels.batch_min_distance(self.actions.tokens(), service.action_sequences))
        return distances or None

    def _consume(self, service: ServiceLabel):
        page_set = {tok for seq in service.page_sequences for tok in seq}
        action_set = {tok for seq in service.action_sequences for tok in seq}
        self.pages.consume(page_set)
        self.actions.consume(action_set)
