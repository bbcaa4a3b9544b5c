"""Ranked recommendations: positive rule matches grouped per service and
ranked by (occurrences desc, max depth desc, service id asc), negative
matches filtered out, recency backfill up to the list size."""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import ServiceId
from .registry import ContextSnapshot
from .rules import RuleTree

DEFAULT_LIST_SIZE = 6
DEFAULT_RECENCY_CAPACITY = 20


@dataclass(frozen=True)
class Recommendation:
    service: ServiceId
    reason: str
    occurrences: int
    max_depth: int
    source: str  # rule | recency
    rule_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "service": str(self.service),
            "reason": self.reason,
            "occurrences": self.occurrences,
            "max_depth": self.max_depth,
            "source": self.source,
            "rule_ids": list(self.rule_ids),
        }


class RecencyLog:
    """Most-recent-first usage log with unique services."""

    def __init__(self, capacity: int = DEFAULT_RECENCY_CAPACITY):
        self.capacity = capacity
        self.entries: list[tuple[ServiceId, int]] = []

    def record(self, service: ServiceId, timestamp: int):
        self.entries = [(s, t) for s, t in self.entries if s != service]
        self.entries.insert(0, (service, timestamp))
        del self.entries[self.capacity:]

    def services(self) -> list[ServiceId]:
        return [s for s, _ in self.entries]

    def to_list(self) -> list[dict]:
        return [{"service": str(s), "last_used_at": t} for s, t in self.entries]


def recommend(snapshot: ContextSnapshot, positive_tree: RuleTree, negative_tree: RuleTree,
              recency: RecencyLog, k: int = DEFAULT_LIST_SIZE) -> list[Recommendation]:
    if k < 1:
        raise ValueError("k must be >= 1")
    grouped: dict[ServiceId, list] = {}
    for match in positive_tree.query(snapshot):
        grouped.setdefault(match.service, []).append(match)
    blocked = {match.service for match in negative_tree.query(snapshot)}

    candidates = []
    for service, matches in grouped.items():
        if service in blocked:
            continue
        deepest = max(matches, key=lambda m: (m.depth, m.rule_id))
        candidates.append(Recommendation(
            service=service,
            reason=deepest.reason,
            occurrences=len(matches),
            max_depth=deepest.depth,
            source="rule",
            rule_ids=tuple(sorted(m.rule_id for m in matches)),
        ))
    candidates.sort(key=lambda r: (-r.occurrences, -r.max_depth, str(r.service)))

    present = {c.service for c in candidates}
    for service in recency.services():
        if len(candidates) >= k:
            break
        if service in present or service in blocked:
            continue
        candidates.append(Recommendation(
            service=service, reason="recently used", occurrences=0, max_depth=0,
            source="recency",
        ))
        present.add(service)
    return candidates[:k]
