import pytest

from sayrea.catalog import Catalog, ServiceId, open_app_service
from sayrea.errors import CatalogValidationError, DuplicateServiceError


def test_shipped_catalog_scale(catalog):
    assert len(catalog.in_app_services()) >= 10
    assert len({s.id.app_id for s in catalog.services}) >= 5


def test_round_trip(catalog):
    again = Catalog.from_dict(catalog.to_dict())
    assert again.to_dict() == catalog.to_dict()


def test_keyword_index_complete(catalog):
    for service in catalog.in_app_services():
        for page in service.pages:
            for kw in page.keywords:
                hits = catalog.pages_for_keyword(kw)
                assert any(p.page_id == page.page_id for _, p in hits)


def test_empty_catalog_is_valid():
    cat = Catalog.from_dict({"apps": []})
    assert cat.services == ()


def test_dangling_page_reference():
    with pytest.raises(CatalogValidationError):
        Catalog.from_dict({"apps": [{
            "app_id": "a", "app_name": "A",
            "services": [{
                "service_key": "s", "semantic": "do s",
                "pages": [{"page_id": "p1", "keywords": ["k"]}],
                "page_sequence": ["p9"],
            }],
        }]})


def test_duplicate_service():
    svc = {
        "service_key": "s", "semantic": "do s",
        "pages": [{"page_id": "p1", "keywords": ["k"]}],
        "page_sequence": ["p1"],
    }
    with pytest.raises(DuplicateServiceError):
        Catalog.from_dict({"apps": [{"app_id": "a", "services": [svc, dict(svc)]}]})


def test_open_app_service():
    label = open_app_service("com.clock", "Clock")
    assert label.semantic == "Clock"
    assert label.kind == "open-app"
    assert label.id == ServiceId("com.clock", "open")
    assert not label.pages and not label.page_sequences
    assert open_app_service("a", "a").semantic == "a"
    assert open_app_service("com.cam", "Camera").semantic == "Camera"


def test_semantic_of_unlabeled_open_app(catalog):
    assert catalog.semantic_of(ServiceId("com.demo.clock", "open")) == "Clock"
    assert catalog.semantic_of(ServiceId("com.unknown", "open")) == "com.unknown"


def test_service_id_parse_rejects_bad():
    with pytest.raises(CatalogValidationError):
        ServiceId.parse("no-slash")
