import pytest
from fastapi.testclient import TestClient

from sayrea.api import create_app
from sayrea.catalog import ServiceId
from sayrea.engine import Engine
from sayrea.identify import MockBackend

NIGHT_HOME = {
    "Time": {"day_of_week": "Monday", "time_period": 24, "o_clock": 24},
    "Location": {"location_tag": "home"},
    "Activities": {"activity": "stilling"},
}


@pytest.fixture
def client(registry, catalog):
    engine = Engine(registry, catalog, MockBackend())
    return TestClient(create_app(engine))


def test_context_returns_semanticized_snapshot(client):
    resp = client.post("/context", json={"values": NIGHT_HOME, "ts": 1000})
    assert resp.status_code == 200
    attrs = {(a["dimension"], a["feature"]): a for a in resp.json()["snapshot"]["attributes"]}
    assert attrs[("Time", "time_period")]["value"] == "deep-night"
    assert attrs[("Location", "location_tag")]["semantic"] == "at home"


def test_recommendations_cold_start(client):
    client.post("/usage", json={"service": "com.demo.chat/open", "ts": 1000})
    client.post("/usage", json={"service": "com.demo.maps/open", "ts": 2000})
    resp = client.get("/recommendations", params={"k": 2})
    recs = resp.json()["recommendations"]
    assert [r["service"] for r in recs] == ["com.demo.maps/open", "com.demo.chat/open"]
    assert all(r["source"] == "recency" for r in recs)


def test_full_api_loop(client):
    client.post("/context", json={"values": NIGHT_HOME, "ts": 1000})
    resp = client.post("/usage", json={"service": "com.demo.clock/set_alarm", "ts": 2000})
    request_id = resp.json()["request"]["request_id"]
    assert client.get("/requests").json()["requests"][0]["request_id"] == request_id
    resp = client.post(f"/requests/{request_id}/reason",
                       json={"text": "before sleep at home", "ts": 9000})
    rule = resp.json()["rule"]
    assert ["Location", "location_tag", "home"] in rule["cause"]
    resp = client.post(f"/requests/{request_id}/select", json={
        "attributes": [["Time", "time_period", "deep-night"],
                       ["Location", "location_tag", "home"]], "ts": 15000})
    assert resp.json()["accurate"] is True
    recs = client.get("/recommendations").json()["recommendations"]
    assert recs[0]["service"] == "com.demo.clock/set_alarm"
    assert recs[0]["reason"] == "before sleep at home"
    assert client.get("/rules").json()["rules"][0]["rule_id"] == rule["rule_id"]
    metrics = client.get("/metrics").json()
    assert metrics["totals"]["N_a"] == 1


def test_events_endpoint_recognizes(client):
    client.post("/context", json={"values": NIGHT_HOME, "ts": 500})
    events = [
        {"ts": 1000, "kind": "page", "keywords": ["alarm", "alarms", "add alarm", "clock"]},
        {"ts": 2000, "kind": "action", "value": "tap:add-alarm"},
        {"ts": 3000, "kind": "page", "keywords": ["hour", "minute", "repeat", "save alarm"]},
        {"ts": 4000, "kind": "action", "value": "tap:save-alarm"},
    ]
    recognized = []
    for ev in events:
        recognized += client.post("/events", json=ev).json()["recognitions"]
    assert [r["service"] for r in recognized] == ["com.demo.clock/set_alarm"]
    assert recognized[0]["distance"] == 0.0


def test_reject_endpoint(client):
    client.post("/usage", json={"service": "com.demo.chat/open", "ts": 1000})
    resp = client.post("/recommendations/com.demo.chat/open/reject", json={"ts": 2000})
    assert resp.status_code == 200
    assert resp.json()["request"]["polarity"] == "negative"
    recs = client.get("/recommendations").json()["recommendations"]
    assert all(r["service"] != "com.demo.chat/open" for r in recs)


def test_error_codes(client):
    assert client.delete("/rules/nope").json()["error"] == "RULE_NOT_FOUND"
    assert client.delete("/rules/nope").status_code == 404
    resp = client.post("/recommendations/ghost/open/reject", json={})
    assert resp.status_code == 404
    assert resp.json()["error"] == "NOT_RECOMMENDED"
    resp = client.post("/requests/zz/reason", json={"text": "hi"})
    assert resp.json()["error"] == "REQUEST_NOT_FOUND"
    client.post("/context", json={"values": NIGHT_HOME, "ts": 100})
    rid = client.post("/usage", json={"service": "a/open", "ts": 200}).json()["request"]["request_id"]
    resp = client.post(f"/requests/{rid}/reason", json={"text": "   ", "ts": 300})
    assert resp.json()["error"] == "EMPTY_REASON"
    resp = client.post(f"/requests/{rid}/reason", json={"text": "xyzzy", "ts": 400})
    assert resp.status_code == 422
    assert resp.json()["error"] == "NO_ATTRIBUTES_IDENTIFIED"
    # request stays pending after a failed identification
    assert client.get("/requests").json()["requests"]


def test_dual_drive_equivalence(registry, catalog):
    """The same scripted session driven over HTTP and in-process produces
    identical rules and metrics."""
    api_engine = Engine(registry, catalog, MockBackend())
    client = TestClient(create_app(api_engine))
    client.post("/context", json={"values": NIGHT_HOME, "ts": 1000})
    rid = client.post("/usage", json={"service": "com.demo.clock/set_alarm",
                                      "ts": 2000}).json()["request"]["request_id"]
    client.post(f"/requests/{rid}/reason", json={"text": "before sleep at home", "ts": 9000})
    client.get("/recommendations")

    direct = Engine(registry, catalog, MockBackend())
    direct.update_context(NIGHT_HOME, 1000)
    req = direct.inject_usage(ServiceId("com.demo.clock", "set_alarm"), 2000)
    direct.submit_reason(req.request_id, "before sleep at home", 9000)

    assert api_engine.export_rules() == direct.export_rules()
    assert api_engine.metrics() == direct.metrics()
    assert [r.to_dict() for r in api_engine.recommendations()] == [
        r.to_dict() for r in direct.recommendations()]


def test_state_endpoint(client):
    client.post("/context", json={"values": NIGHT_HOME, "ts": 1000})
    state = client.get("/state").json()
    assert state["v"] == 1
    assert {"snapshot", "recommendations", "pending_requests", "rules",
            "recency", "metrics"} <= set(state)
