"""Context model: dimensions, features, attributes, snapshots.

Raw sensed values are semanticized twice over: a human/LLM-readable string
produced from the feature's template, and a canonical value (band label,
category token, or folded free text) used for rule matching.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional

from .errors import (
    RangeError,
    UnknownAttributeError,
    UnknownCategoryError,
    UnknownFeatureError,
)

CATEGORICAL = "categorical"
DISCRETIZED = "discretized-numeric"
FREE_TEXT = "free-text-tag"


@dataclass(frozen=True)
class Band:
    label: str
    lower: float
    upper: float  # half-open [lower, upper)

    def contains(self, value: float) -> bool:
        return self.lower <= value < self.upper


@dataclass(frozen=True)
class ContextFeature:
    id: str
    display_name: str
    value_kind: str
    template: str
    categories: tuple[str, ...] = ()
    bands: tuple[Band, ...] = ()
    color_tag: Optional[str] = None

    def __post_init__(self):
        if self.template.count("{value}") != 1:
            raise ValueError(f"feature {self.id}: template needs exactly one placeholder")
        if self.value_kind == DISCRETIZED:
            if not self.bands:
                raise ValueError(f"feature {self.id}: discretized feature needs bands")
            ordered = sorted(self.bands, key=lambda b: b.lower)
            for a, b in zip(ordered, ordered[1:]):
                if a.upper > b.lower:
                    raise ValueError(f"feature {self.id}: bands overlap at {b.lower}")
                if a.upper < b.lower:
                    raise ValueError(f"feature {self.id}: bands leave gap at {a.upper}")
        elif self.value_kind == CATEGORICAL and not self.categories:
            raise ValueError(f"feature {self.id}: categorical feature needs categories")

    @property
    def declared_range(self) -> tuple[float, float]:
        ordered = sorted(self.bands, key=lambda b: b.lower)
        return ordered[0].lower, ordered[-1].upper

    def band_for(self, value: float) -> Band:
        for band in self.bands:
            if band.contains(value):
                return band
        lo, hi = self.declared_range
        raise RangeError(f"{self.id}: value {value} outside declared range [{lo}, {hi})")


@dataclass(frozen=True)
class ContextDimension:
    id: str
    display_name: str
    features: tuple[ContextFeature, ...]
    registry_index: int

    def __post_init__(self):
        ids = [f.id for f in self.features]
        if len(set(ids)) != len(ids):
            raise ValueError(f"dimension {self.id}: duplicate feature ids")


@dataclass(frozen=True, order=False)
class ContextAttribute:
    dimension_id: str
    feature_id: str
    canonical_value: str
    semantic: str
    color_tag: Optional[str] = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.dimension_id, self.feature_id)

    def triple(self) -> list[str]:
        return [self.dimension_id, self.feature_id, self.canonical_value]

    def to_dict(self) -> dict:
        d = {
            "dimension": self.dimension_id,
            "feature": self.feature_id,
            "value": self.canonical_value,
            "semantic": self.semantic,
        }
        if self.color_tag:
            d["color_tag"] = self.color_tag
        return d


def _render(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


class Registry:
    """Immutable registry of context dimensions and features."""

    def __init__(self, dimensions: Iterable[ContextDimension]):
        self.dimensions = tuple(dimensions)
        indexes = [d.registry_index for d in self.dimensions]
        if sorted(indexes) != list(range(len(self.dimensions))):
            raise ValueError("registry_index values must be unique and contiguous from 0")
        self._by_dim = {d.id: d for d in self.dimensions}
        if len(self._by_dim) != len(self.dimensions):
            raise ValueError("duplicate dimension ids")
        self._feature_pos: dict[tuple[str, str], tuple[int, int, ContextFeature]] = {}
        for dim in self.dimensions:
            for i, feat in enumerate(dim.features):
                self._feature_pos[(dim.id, feat.id)] = (dim.registry_index, i, feat)

    # -- lookup -------------------------------------------------------------

    def dimension(self, dim_id: str) -> ContextDimension:
        try:
            return self._by_dim[dim_id]
        except KeyError:
            raise UnknownAttributeError(f"unknown dimension {dim_id!r}") from None

    def feature(self, dim_id: str, feat_id: str) -> ContextFeature:
        try:
            return self._feature_pos[(dim_id, feat_id)][2]
        except KeyError:
            raise UnknownFeatureError(f"unknown feature {dim_id}/{feat_id}") from None

    def resolves(self, attr: ContextAttribute) -> bool:
        return (attr.dimension_id, attr.feature_id) in self._feature_pos

    # -- semanticization ----------------------------------------------------

    def semanticize(self, dim_id: str, feat_id: str, raw_value) -> ContextAttribute:
        feat = self.feature(dim_id, feat_id)
        if feat.value_kind == DISCRETIZED:
            if not isinstance(raw_value, (int, float)) or isinstance(raw_value, bool):
                raise RangeError(f"{feat.id}: expected a number, got {raw_value!r}")
            band = feat.band_for(float(raw_value))
            semantic = feat.template.format(value=_render(raw_value))
            canonical = band.label
        elif feat.value_kind == CATEGORICAL:
            text = str(raw_value).strip()
            match = next((c for c in feat.categories if c.casefold() == text.casefold()), None)
            if match is None:
                raise UnknownCategoryError(f"{feat.id}: unknown category {text!r}")
            semantic = feat.template.format(value=match)
            canonical = match
        else:  # free text: exact match after trim + case-fold
            text = str(raw_value).strip()
            if not text:
                raise UnknownCategoryError(f"{feat.id}: empty free-text value")
            semantic = feat.template.format(value=text)
            canonical = text.casefold()
        return ContextAttribute(dim_id, feat_id, canonical, semantic, feat.color_tag)

    # -- canonical ordering -------------------------------------------------

    def sort_key(self, attr: ContextAttribute) -> tuple[int, int, str]:
        try:
            dim_idx, feat_idx, _ = self._feature_pos[(attr.dimension_id, attr.feature_id)]
        except KeyError:
            raise UnknownAttributeError(
                f"unresolvable attribute {attr.dimension_id}/{attr.feature_id}"
            ) from None
        return (dim_idx, feat_idx, attr.canonical_value)

    def compare(self, x: ContextAttribute, y: ContextAttribute) -> int:
        kx, ky = self.sort_key(x), self.sort_key(y)
        return (kx > ky) - (kx < ky)

    def sorted_attributes(self, attrs: Iterable[ContextAttribute]) -> list[ContextAttribute]:
        return sorted(attrs, key=self.sort_key)

    # -- serialization ------------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "Registry":
        dims = []
        for idx, d in enumerate(doc["dimensions"]):
            feats = []
            for f in d["features"]:
                feats.append(
                    ContextFeature(
                        id=f["id"],
                        display_name=f.get("display_name", f["id"]),
                        value_kind=f["value_kind"],
                        template=f.get("template", "{value}"),
                        categories=tuple(f.get("categories", ())),
                        bands=tuple(Band(b[0], float(b[1]), float(b[2])) for b in f.get("bands", ())),
                        color_tag=f.get("color_tag"),
                    )
                )
            dims.append(
                ContextDimension(
                    id=d["id"],
                    display_name=d.get("display_name", d["id"]),
                    features=tuple(feats),
                    registry_index=idx,
                )
            )
        return cls(dims)

    @classmethod
    def load(cls, path=None) -> "Registry":
        if path is None:
            text = resources.files("sayrea.data").joinpath("registry.json").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "v": 1,
            "dimensions": [
                {
                    "id": d.id,
                    "display_name": d.display_name,
                    "features": [
                        {
                            "id": f.id,
                            "display_name": f.display_name,
                            "value_kind": f.value_kind,
                            "template": f.template,
                            **({"categories": list(f.categories)} if f.categories else {}),
                            **(
                                {"bands": [[b.label, b.lower, b.upper] for b in f.bands]}
                                if f.bands
                                else {}
                            ),
                            **({"color_tag": f.color_tag} if f.color_tag else {}),
                        }
                        for f in d.features
                    ],
                }
                for d in self.dimensions
            ],
        }


@dataclass(frozen=True)
class ContextSnapshot:
    """The full attribute set at one instant; at most one value per feature."""

    timestamp: int  # epoch milliseconds
    attributes: frozenset[ContextAttribute] = field(default_factory=frozenset)

    def __post_init__(self):
        keys = [a.key for a in self.attributes]
        if len(set(keys)) != len(keys):
            raise ValueError("snapshot holds more than one value for a feature")

    def value_of(self, dim_id: str, feat_id: str) -> Optional[str]:
        for a in self.attributes:
            if a.key == (dim_id, feat_id):
                return a.canonical_value
        return None

    def get(self, dim_id: str, feat_id: str) -> Optional[ContextAttribute]:
        for a in self.attributes:
            if a.key == (dim_id, feat_id):
                return a
        return None

    def triples(self) -> set[tuple[str, str, str]]:
        return {tuple(a.triple()) for a in self.attributes}

    def with_attributes(self, attrs: Iterable[ContextAttribute], timestamp=None) -> "ContextSnapshot":
        merged = {a.key: a for a in self.attributes}
        for a in attrs:
            merged[a.key] = a
        return ContextSnapshot(
            timestamp if timestamp is not None else self.timestamp, frozenset(merged.values())
        )


def snapshot_diff(a: ContextSnapshot, b: ContextSnapshot) -> set[ContextAttribute]:
    """Attributes of b that changed relative to a, plus features present in
    only one of the two snapshots (reported from whichever side has them)."""
    a_map = {x.key: x for x in a.attributes}
    b_map = {x.key: x for x in b.attributes}
    changed: set[ContextAttribute] = set()
    for key, attr in b_map.items():
        old = a_map.get(key)
        if old is None or old.canonical_value != attr.canonical_value:
            changed.add(attr)
    for key, attr in a_map.items():
        if key not in b_map:
            changed.add(attr)
    return changed
