"""Service catalog: labeled in-app services (keyword pages + chronological
page/action sequences) and open-app services."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import CatalogValidationError, DuplicateServiceError

OPEN_KEY = "open"


@dataclass(frozen=True)
class ServiceId:
    app_id: str
    service_key: str

    def __post_init__(self):
        if not self.app_id or not self.service_key:
            raise CatalogValidationError("ServiceId components must be non-empty")

    def __str__(self):
        return f"{self.app_id}/{self.service_key}"

    @classmethod
    def parse(cls, text: str) -> "ServiceId":
        app_id, _, key = text.partition("/")
        if not key:
            raise CatalogValidationError(f"bad service id {text!r}")
        return cls(app_id, key)


def _norm_keyword(kw: str) -> str:
    return kw.strip().casefold()


@dataclass(frozen=True)
class PageLabel:
    page_id: str
    keywords: frozenset[str]

    def __post_init__(self):
        if not self.keywords:
            raise CatalogValidationError(f"page {self.page_id}: keywords must be non-empty")


@dataclass(frozen=True)
class ServiceLabel:
    id: ServiceId
    semantic: str
    pages: tuple[PageLabel, ...] = ()
    page_sequences: tuple[tuple[str, ...], ...] = ()
    action_sequences: tuple[tuple[str, ...], ...] = ()
    kind: str = "in-app"  # or "open-app"

    def __post_init__(self):
        if self.kind == "open-app":
            if self.pages or self.page_sequences or self.action_sequences:
                raise CatalogValidationError(f"{self.id}: open-app labels carry no pages or steps")
            return
        if not self.pages or not self.page_sequences or not any(self.page_sequences):
            raise CatalogValidationError(f"{self.id}: in-app labels need pages and at least one step")
        page_ids = {p.page_id for p in self.pages}
        for seq in self.page_sequences:
            for pid in seq:
                if pid not in page_ids:
                    raise CatalogValidationError(f"{self.id}: page sequence references unknown page {pid!r}")


def open_app_service(app_id: str, app_name: str) -> ServiceLabel:
    """Open-app service; its semantic is the application name."""
    return ServiceLabel(id=ServiceId(app_id, OPEN_KEY), semantic=app_name, kind="open-app")


@dataclass(frozen=True)
class Catalog:
    services: tuple[ServiceLabel, ...]
    app_names: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for s in self.services:
            if s.id in seen:
                raise DuplicateServiceError(f"duplicate service {s.id}")
            seen.add(s.id)
        # keyword -> candidate pages index
        index: dict[str, list[tuple[ServiceLabel, PageLabel]]] = {}
        by_id = {}
        for s in self.services:
            by_id[s.id] = s
            for page in s.pages:
                for kw in page.keywords:
                    index.setdefault(kw, []).append((s, page))
        object.__setattr__(self, "_keyword_index", index)
        object.__setattr__(self, "_by_id", by_id)

    def service(self, sid: ServiceId) -> Optional[ServiceLabel]:
        return self._by_id.get(sid)

    def pages_for_keyword(self, keyword: str) -> list[tuple[ServiceLabel, PageLabel]]:
        return self._keyword_index.get(_norm_keyword(keyword), [])

    def in_app_services(self) -> list[ServiceLabel]:
        return [s for s in self.services if s.kind == "in-app"]

    def app_name(self, app_id: str) -> str:
        return self.app_names.get(app_id, app_id)

    def semantic_of(self, sid: ServiceId) -> str:
        label = self.service(sid)
        if label is not None:
            return label.semantic
        if sid.service_key == OPEN_KEY:
            return self.app_name(sid.app_id)
        return str(sid)

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "Catalog":
        services: list[ServiceLabel] = []
        app_names: dict[str, str] = {}
        for app in doc.get("apps", []):
            app_id = app["app_id"]
            app_names[app_id] = app.get("app_name", app_id)
            for svc in app.get("services", []):
                pages = tuple(
                    PageLabel(p["page_id"], frozenset(_norm_keyword(k) for k in p["keywords"]))
                    for p in svc.get("pages", [])
                )
                page_seqs = _sequences(svc, "page_sequence", "page_sequences")
                action_seqs = _sequences(svc, "action_sequence", "action_sequences")
                kind = "open-app" if svc["service_key"] == OPEN_KEY and not pages else "in-app"
                services.append(
                    ServiceLabel(
                        id=ServiceId(app_id, svc["service_key"]),
                        semantic=svc["semantic"],
                        pages=pages,
                        page_sequences=page_seqs,
                        action_sequences=action_seqs,
                        kind=kind,
                    )
                )
        return cls(tuple(services), app_names)

    def to_dict(self) -> dict:
        apps: dict[str, dict] = {}
        for app_id, name in self.app_names.items():
            apps[app_id] = {"app_id": app_id, "app_name": name, "services": []}
        for s in self.services:
            entry = apps.setdefault(
                s.id.app_id, {"app_id": s.id.app_id, "app_name": s.id.app_id, "services": []}
            )
            entry["services"].append(
                {
                    "service_key": s.id.service_key,
                    "semantic": s.semantic,
                    "pages": [
                        {"page_id": p.page_id, "keywords": sorted(p.keywords)} for p in s.pages
                    ],
                    "page_sequences": [list(seq) for seq in s.page_sequences],
                    "action_sequences": [list(seq) for seq in s.action_sequences],
                }
            )
        return {"v": 1, "apps": sorted(apps.values(), key=lambda a: a["app_id"])}

    @classmethod
    def load(cls, path=None) -> "Catalog":
        if path is None:
            text = resources.files("sayrea.data").joinpath("catalog.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CatalogValidationError(f"catalog does not parse: {exc}") from exc
        return cls.from_dict(doc)


def _sequences(svc: dict, singular: str, plural: str) -> tuple[tuple[str, ...], ...]:
    if plural in svc:
        seqs = tuple(tuple(seq) for seq in svc[plural])
    elif singular in svc and svc[singular]:
        seqs = (tuple(svc[singular]),)
    else:
        seqs = ()
    return tuple(s for s in seqs if s)
