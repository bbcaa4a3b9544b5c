"""Contextual rules and the context rule tree.

The tree is a trie over context attributes kept strictly increasing in
canonical order along every root-to-node path, so any attribute set maps to
exactly one path. Nodes store (service, reason, rule_id) entries; positive
and negative rules live in separate trees. The persisted form is the flat
rule list; the tree is a derived index rebuilt on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .catalog import ServiceId
from .errors import RuleNotFoundError
from .registry import ContextAttribute, ContextSnapshot, Registry

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class ContextualRule:
    rule_id: str
    cause: frozenset[ContextAttribute]
    service: ServiceId
    polarity: str
    reason: str
    created_at: int = 0
    origin: str = "user-reason"  # user-reason | predicted-reason-confirm | feedback

    def __post_init__(self):
        if not self.cause:
            raise ValueError("rule cause must be non-empty")
        keys = [a.key for a in self.cause]
        if len(set(keys)) != len(keys):
            raise ValueError("rule cause holds two values for one feature")
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise ValueError(f"bad polarity {self.polarity!r}")

    def to_dict(self) -> dict:
        return {
            "v": 1,
            "rule_id": self.rule_id,
            "cause": sorted(a.triple() for a in self.cause),
            "cause_semantics": {
                f"{a.dimension_id}/{a.feature_id}": a.semantic for a in sorted(
                    self.cause, key=lambda x: x.triple())
            },
            "service": str(self.service),
            "polarity": self.polarity,
            "reason": self.reason,
            "created_at": self.created_at,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ContextualRule":
        semantics = doc.get("cause_semantics", {})
        cause = frozenset(
            ContextAttribute(d, f, v, semantics.get(f"{d}/{f}", v))
            for d, f, v in (tuple(t) for t in doc["cause"])
        )
        return cls(
            rule_id=doc["rule_id"],
            cause=cause,
            service=ServiceId.parse(doc["service"]),
            polarity=doc["polarity"],
            reason=doc["reason"],
            created_at=doc.get("created_at", 0),
            origin=doc.get("origin", "user-reason"),
        )


@dataclass(frozen=True)
class RuleMatch:
    service: ServiceId
    rule_id: str
    reason: str
    depth: int
    cause: frozenset[ContextAttribute] = frozenset()


class _Node:
    __slots__ = ("attribute", "children", "entries")

    def __init__(self, attribute: Optional[ContextAttribute] = None):
        self.attribute = attribute
        self.children: dict[tuple, "_Node"] = {}  # sort_key -> node
        self.entries: list[ContextualRule] = []


class RuleTree:
    """Canonical-order trie over context attributes for one polarity."""

    def __init__(self, registry: Registry, polarity: str = POSITIVE):
        self.registry = registry
        self.polarity = polarity
        self.root = _Node()
        self._by_id: dict[str, tuple[_Node, ContextualRule]] = {}

    def __len__(self):
        return len(self._by_id)

    def rules(self) -> list[ContextualRule]:
        return [rule for _, rule in self._by_id.values()]

    def insert(self, rule: ContextualRule) -> str:
        """Returns "inserted" or "duplicate" (same cause and service)."""
        if rule.polarity != self.polarity:
            raise ValueError(f"{rule.polarity} rule offered to {self.polarity} tree")
        node = self.root
        for attr in self.registry.sorted_attributes(rule.cause):
            key = self.registry.sort_key(attr)
            child = node.children.get(key)
            if child is None:
                child = _Node(attr)
                node.children[key] = child
            node = child
        if any(r.service == rule.service for r in node.entries):
            return "duplicate"
        node.entries.append(rule)
        self._by_id[rule.rule_id] = (node, rule)
        return "inserted"

    def delete(self, rule_id: str) -> bool:
        found = self._by_id.pop(rule_id, None)
        if found is None:
            return False
        node, rule = found
        node.entries.remove(rule)
        self._prune()
        return True

    def _prune(self):
        def walk(node: _Node):
            for key in list(node.children):
                child = node.children[key]
                walk(child)
                if not child.children and not child.entries:
                    del node.children[key]

        walk(self.root)

    def get(self, rule_id: str) -> Optional[ContextualRule]:
        found = self._by_id.get(rule_id)
        return found[1] if found else None

    def query(self, snapshot: ContextSnapshot) -> list[RuleMatch]:
        """All stored rules whose entire cause is satisfied by the snapshot."""
        keys = sorted(self.registry.sort_key(a) for a in snapshot.attributes)
        out: list[RuleMatch] = []

        def walk(node: _Node, start: int, depth: int):
            for rule in node.entries:
                out.append(RuleMatch(
                    service=rule.service,
                    rule_id=rule.rule_id,
                    reason=rule.reason,
                    depth=depth,
                    cause=rule.cause,
                ))
            if not node.children:
                return
            for i in range(start, len(keys)):
                child = node.children.get(keys[i])
                if child is not None:
                    walk(child, i + 1, depth + 1)

        walk(self.root, 0, 0)
        return out

    # -- persistence --------------------------------------------------------

    def export_jsonl(self) -> str:
        rules = sorted(self.rules(), key=lambda r: (r.created_at, r.rule_id))
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in rules)

    @classmethod
    def from_rules(cls, registry: Registry, polarity: str,
                   rules: Iterable[ContextualRule]) -> "RuleTree":
        tree = cls(registry, polarity)
        for rule in rules:
            tree.insert(rule)
        return tree

    @classmethod
    def load_jsonl(cls, registry: Registry, polarity: str, text: str) -> "RuleTree":
        rules = [ContextualRule.from_dict(json.loads(line))
                 for line in text.splitlines() if line.strip()]
        return cls.from_rules(registry, polarity, [r for r in rules if r.polarity == polarity])


class RuleStore:
    """Positive and negative trees plus id lookup across both."""

    def __init__(self, registry: Registry):
        self.registry = registry
        self.positive = RuleTree(registry, POSITIVE)
        self.negative = RuleTree(registry, NEGATIVE)

    def tree_for(self, polarity: str) -> RuleTree:
        return self.positive if polarity == POSITIVE else self.negative

    def insert(self, rule: ContextualRule) -> str:
        return self.tree_for(rule.polarity).insert(rule)

    def delete(self, rule_id: str) -> bool:
        return self.positive.delete(rule_id) or self.negative.delete(rule_id)

    def get(self, rule_id: str) -> ContextualRule:
        rule = self.positive.get(rule_id) or self.negative.get(rule_id)
        if rule is None:
            raise RuleNotFoundError(f"no rule {rule_id!r}")
        return rule

    def all_rules(self) -> list[ContextualRule]:
        rules = self.positive.rules() + self.negative.rules()
        return sorted(rules, key=lambda r: (r.created_at, r.rule_id))

    def export_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in self.all_rules())
