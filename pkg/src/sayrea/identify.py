"""Attribute identification: builds the dialogue-form prompt from
(reason, service, snapshot), sends it to a completion backend, and parses
the completion back into registry attributes. A deterministic lexicon-based
mock backend serves offline runs and tests."""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import (
    BackendUnavailableError,
    EmptyReasonError,
    NoAttributesIdentifiedError,
    UndefinedAccuracyError,
)
from .registry import ContextAttribute, ContextSnapshot, Registry

GUIDANCE = (
    "You are helping a phone assistant learn when a service matters to its user. "
    "The user just used a service and gave a short reason. From the list of current "
    "context attributes, pick only the attributes that explain the reason. Reply with "
    "one attribute per line, copied exactly from the list."
)

FORMAT_EXAMPLE = (
    "Reason: too noisy outside\n"
    "Service: play white noise\n"
    "Context attributes:\n"
    "Time/time_period: around 23:00\n"
    "Location/location_tag: at home\n"
    "Completion:\n"
    "- Location/location_tag: at home\n"
)


@dataclass(frozen=True)
class PromptBundle:
    guidance: str
    format_example: str
    reason: str
    service_semantic: str
    attribute_lines: tuple[str, ...]

    def render(self) -> str:
        lines = "\n".join(self.attribute_lines)
        return (
            f"{self.guidance}\n\n{self.format_example}\n"
            f"Reason: {self.reason}\nService: {self.service_semantic}\n"
            f"Context attributes:\n{lines}\nCompletion:\n"
        )


@dataclass(frozen=True)
class IdentifiedCause:
    attributes: frozenset[ContextAttribute]
    raw_completion: str
    backend: str
    latency_ms: float = 0.0
    dropped_lines: tuple[str, ...] = ()


def attribute_line(attr: ContextAttribute) -> str:
    return f"{attr.dimension_id}/{attr.feature_id}: {attr.semantic}"


def build_prompt(reason: str, service_semantic: str, snapshot: ContextSnapshot,
                 registry: Registry) -> PromptBundle:
    reason = reason.strip()
    if not reason:
        raise EmptyReasonError("reason must be non-empty")
    attrs = registry.sorted_attributes(snapshot.attributes)
    return PromptBundle(
        guidance=GUIDANCE,
        format_example=FORMAT_EXAMPLE,
        reason=reason,
        service_semantic=service_semantic,
        attribute_lines=tuple(attribute_line(a) for a in attrs),
    )


_LINE_PREFIX = re.compile(r"^\s*(?:[-*•]|\d+[.)])?\s*")


def _normalize_line(line: str) -> str:
    return _LINE_PREFIX.sub("", line).strip().casefold()


def parse_completion(completion: str, snapshot: ContextSnapshot,
                     registry: Registry) -> tuple[set[ContextAttribute], list[str]]:
    """Match completion lines back to snapshot attributes; unknown lines are
    dropped, never invented."""
    by_line = {}
    by_head = {}
    for attr in snapshot.attributes:
        by_line[attribute_line(attr).casefold()] = attr
        by_head[f"{attr.dimension_id}/{attr.feature_id}".casefold()] = attr
    matched: set[ContextAttribute] = set()
    dropped: list[str] = []
    for raw in completion.splitlines():
        line = _normalize_line(raw)
        if not line:
            continue
        attr = by_line.get(line)
        if attr is None:
            head = line.split(":", 1)[0].strip()
            attr = by_head.get(head)
        if attr is None:
            attr = next((a for a in snapshot.attributes if a.semantic.casefold() == line), None)
        if attr is None:
            dropped.append(raw.strip())
        else:
            matched.add(attr)
    return matched, dropped


class MockBackend:
    """Deterministic lexicon scorer standing in for a hosted model."""

    name = "mock"

    def __init__(self, lexicon: Optional[dict] = None):
        if lexicon is None:
            lexicon = json.loads(
                resources.files("sayrea.data").joinpath("lexicon.json").read_text())
        self.lexicon = {k.casefold(): tuple(v) for k, v in lexicon.items()}

    def complete(self, bundle: PromptBundle) -> str:
        # Interprets the bundle directly; output uses the same line format
        # the parser accepts so the full path stays exercised.
        scored = self._score(bundle.reason, bundle.attribute_lines)
        return "\n".join(f"- {line}" for line, _ in scored)

    def _score(self, reason: str, attribute_lines) -> list[tuple[str, int]]:
        reason_tokens = _tokens(reason)
        scored = []
        for pos, line in enumerate(attribute_lines):
            head, _, semantic = line.partition(":")
            dim, _, feat = head.partition("/")
            target_tokens = _tokens(semantic) | _tokens(feat.replace("_", " ")) | _tokens(dim)
            score = len(reason_tokens & target_tokens)
            for word in reason_tokens:
                mapped = self.lexicon.get(word)
                if mapped and (dim.strip(), feat.strip()) == tuple(mapped):
                    score += 1
            if score >= 1:
                scored.append((line, score, pos))
        scored.sort(key=lambda t: (-t[1], t[2]))
        return [(line, score) for line, score, _ in scored[:4]]


_WORD = re.compile(r"[a-z0-9]+")

# Function words never count toward overlap; templates like "at {value}"
# would otherwise make every reason containing "at" a weak match.
_STOPWORDS = frozenset(
    "a an and around at for in is it my near of on or the to with".split())


def _tokens(text: str) -> set[str]:
    return set(_WORD.findall(text.casefold())) - _STOPWORDS


class HttpBackend:
    """Chat-style completion endpoint; request is a role/content message
    list at temperature 0."""

    name = "http"

    def __init__(self, url: Optional[str] = None, api_key: Optional[str] = None,
                 model: Optional[str] = None, timeout: float = 30.0, retries: int = 2):
        self.url = url or os.environ.get("SAYREA_LLM_URL", "")
        self.api_key = api_key or os.environ.get("SAYREA_LLM_KEY", "")
        self.model = model or os.environ.get("SAYREA_LLM_MODEL", "")
        self.timeout = timeout
        self.retries = retries
        if not self.url:
            raise BackendUnavailableError("SAYREA_LLM_URL is not configured")

    def complete(self, bundle: PromptBundle) -> str:
        import httpx

        payload = {
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": bundle.guidance},
                {"role": "user", "content": bundle.render()},
            ],
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_exc = None
        for attempt in range(self.retries + 1):
            try:
                resp = httpx.post(self.url, json=payload, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                doc = resp.json()
                return doc["choices"][0]["message"]["content"]
            except Exception as exc:  # transport or shape failure; retry with backoff
                last_exc = exc
                if attempt < self.retries:
                    time.sleep(0.2 * (attempt + 1))
        raise BackendUnavailableError(f"completion backend failed: {last_exc}")


def make_backend(kind: str, **kwargs):
    if kind == "mock":
        return MockBackend(**kwargs)
    if kind == "http":
        return HttpBackend(**kwargs)
    raise ValueError(f"unknown backend {kind!r}")


def identify(bundle: PromptBundle, backend, snapshot: ContextSnapshot,
             registry: Registry) -> IdentifiedCause:
    start = time.monotonic()
    completion = backend.complete(bundle)
    latency = (time.monotonic() - start) * 1000.0
    matched, dropped = parse_completion(completion, snapshot, registry)
    if not matched:
        raise NoAttributesIdentifiedError(
            f"no completion line matched a snapshot attribute (dropped {len(dropped)})")
    return IdentifiedCause(
        attributes=frozenset(matched),
        raw_completion=completion,
        backend=backend.name,
        latency_ms=latency,
        dropped_lines=tuple(dropped),
    )


def mock_identify(reason: str, snapshot: ContextSnapshot, registry: Registry,
                  service_semantic: str = "", lexicon: Optional[dict] = None) -> IdentifiedCause:
    bundle = build_prompt(reason, service_semantic or "service", snapshot, registry)
    return identify(bundle, MockBackend(lexicon), snapshot, registry)


def overlap_accuracy(user_choice: set, predicted: set) -> tuple[float, bool]:
    """Fraction of the user's chosen attributes also predicted; accurate only
    strictly above 0.75."""
    if not user_choice:
        raise UndefinedAccuracyError("user choice is empty")
    ratio = len(set(user_choice) & set(predicted)) / len(set(user_choice))
    return ratio, ratio > 0.75
