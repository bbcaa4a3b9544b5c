import random

import pytest

from sayrea.catalog import Catalog
from sayrea.registry import ContextAttribute, ContextSnapshot, Registry


@pytest.fixture(scope="session")
def registry():
    return Registry.load()


@pytest.fixture(scope="session")
def catalog():
    return Catalog.load()


def small_registry(n_dims=6, feats_per_dim=2, values_per_feat=3):
    """Synthetic registry for randomized rule-tree instances."""
    return Registry.from_dict({
        "dimensions": [
            {
                "id": f"d{i}",
                "features": [
                    {
                        "id": f"f{j}",
                        "value_kind": "categorical",
                        "template": "{value}",
                        "categories": [f"v{k}" for k in range(values_per_feat)],
                    }
                    for j in range(feats_per_dim)
                ],
            }
            for i in range(n_dims)
        ]
    })


_FREE_TEXT_POOL = ["home", "office", "dorm", "gym", "cafe", "park"]


def random_attribute(rng: random.Random, registry: Registry) -> ContextAttribute:
    dim = rng.choice(registry.dimensions)
    feat = rng.choice(dim.features)
    if feat.value_kind == "categorical":
        value = rng.choice(feat.categories)
    elif feat.value_kind == "discretized-numeric":
        band = rng.choice(feat.bands)
        lo = band.lower if band.lower != float("-inf") else band.upper - 1
        hi = band.upper if band.upper != float("inf") else band.lower + 1
        value = rng.uniform(lo, hi)
    else:
        value = rng.choice(_FREE_TEXT_POOL)
    return registry.semanticize(dim.id, feat.id, value)


def random_snapshot(rng: random.Random, registry: Registry, max_attrs=8,
                    timestamp=0) -> ContextSnapshot:
    chosen = {}
    for _ in range(rng.randint(0, max_attrs)):
        attr = random_attribute(rng, registry)
        chosen[attr.key] = attr
    return ContextSnapshot(timestamp, frozenset(chosen.values()))


def random_cause(rng: random.Random, registry: Registry, max_attrs=4):
    chosen = {}
    for _ in range(rng.randint(1, max_attrs)):
        attr = random_attribute(rng, registry)
        chosen[attr.key] = attr
    return frozenset(chosen.values())
