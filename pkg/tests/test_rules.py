import itertools
import random

import pytest

from sayrea.catalog import ServiceId
from sayrea.registry import ContextSnapshot
from sayrea.rules import NEGATIVE, POSITIVE, ContextualRule, RuleStore, RuleTree

from conftest import random_cause, random_snapshot, small_registry
from oracles import subset_query

ALARM = ServiceId("com.demo.clock", "set_alarm")
MUSIC = ServiceId("com.demo.music", "play_playlist")


def attrs(registry, *specs):
    return frozenset(registry.semanticize(d, f, v) for d, f, v in specs)


def rule(registry, rid, cause_specs, service=ALARM, polarity=POSITIVE, reason="because"):
    return ContextualRule(rid, attrs(registry, *cause_specs), service, polarity, reason)


HOME_NIGHT_STILL = [
    ("Location", "location_tag", "home"),
    ("Time", "time_period", 24),
    ("Activities", "activity", "stilling"),
]


class TestInsert:
    def test_duplicate_cause_and_service(self, registry):
        tree = RuleTree(registry)
        assert tree.insert(rule(registry, "r1", HOME_NIGHT_STILL)) == "inserted"
        assert tree.insert(rule(registry, "r2", HOME_NIGHT_STILL)) == "duplicate"
        assert len(tree) == 1
        assert tree.get("r1") is not None and tree.get("r2") is None

    def test_same_cause_two_services_share_path(self, registry):
        tree = RuleTree(registry)
        cause = HOME_NIGHT_STILL[:2]
        tree.insert(rule(registry, "r1", cause, service=ALARM))
        tree.insert(rule(registry, "r2", cause, service=MUSIC))
        node = tree._by_id["r1"][0]
        assert node is tree._by_id["r2"][0]
        assert len(node.entries) == 2

    def test_prefix_path_sharing(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", [("Location", "location_tag", "home")]))
        tree.insert(rule(registry, "r2",
                         [("Location", "location_tag", "home"),
                          ("Notification", "current_notifications", 0)], service=MUSIC))
        parent = tree._by_id["r1"][0]
        child = tree._by_id["r2"][0]
        assert child in parent.children.values()

    def test_permutations_one_path(self, registry):
        for perm in itertools.permutations(HOME_NIGHT_STILL):
            tree = RuleTree(registry)
            tree.insert(rule(registry, "r1", list(perm)))
            # path length equals cause size regardless of insertion order
            snapshot = ContextSnapshot(0, attrs(registry, *HOME_NIGHT_STILL))
            matches = tree.query(snapshot)
            assert len(matches) == 1 and matches[0].depth == 3

    def test_wrong_polarity(self, registry):
        tree = RuleTree(registry, NEGATIVE)
        with pytest.raises(ValueError):
            tree.insert(rule(registry, "r1", HOME_NIGHT_STILL, polarity=POSITIVE))


class TestDelete:
    def test_delete_only_rule(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", HOME_NIGHT_STILL))
        assert tree.delete("r1") is True
        assert len(tree) == 0
        assert tree.root.children == {}

    def test_delete_unknown(self, registry):
        assert RuleTree(registry).delete("nope") is False

    def test_delete_internal_keeps_child(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", HOME_NIGHT_STILL[:1]))
        tree.insert(rule(registry, "r2", HOME_NIGHT_STILL[:2], service=MUSIC))
        tree.delete("r1")
        snapshot = ContextSnapshot(0, attrs(registry, *HOME_NIGHT_STILL))
        got = {m.rule_id for m in tree.query(snapshot)}
        expected = {r.rule_id for r in subset_query(tree.rules(), snapshot.triples())}
        assert got == expected == {"r2"}


class TestQuery:
    def test_tree_fixture_match(self, registry):
        tree = RuleTree(registry)
        tree.insert(ContextualRule("r1", attrs(registry, *HOME_NIGHT_STILL), ALARM,
                                   POSITIVE, "Before sleep"))
        charging = attrs(registry, *HOME_NIGHT_STILL,
                         ("Bluetooth", "bluetooth_state", "on"))
        matches = tree.query(ContextSnapshot(0, charging))
        assert len(matches) == 1
        assert matches[0].service == ALARM
        assert matches[0].depth == 3
        assert matches[0].reason == "Before sleep"

    def test_conjunctive_semantics(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", HOME_NIGHT_STILL))
        partial = ContextSnapshot(0, attrs(registry, *HOME_NIGHT_STILL[:2]))
        assert tree.query(partial) == []

    def test_empty_snapshot(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", HOME_NIGHT_STILL))
        assert tree.query(ContextSnapshot(0, frozenset())) == []

    @pytest.mark.parametrize("seed", range(10))
    def test_oracle_equivalence_random(self, seed):
        reg = small_registry()
        rng = random.Random(seed)
        tree = RuleTree(reg)
        rules = []
        for i in range(rng.randint(1, 50)):
            r = ContextualRule(f"r{i}", random_cause(rng, reg),
                               ServiceId(f"app{rng.randint(0, 5)}", "open"),
                               POSITIVE, f"reason {i}")
            if tree.insert(r) == "inserted":
                rules.append(r)
        for _ in range(200):
            s = random_snapshot(rng, reg)
            got = {(m.rule_id, m.depth) for m in tree.query(s)}
            expected = {(r.rule_id, len(r.cause))
                        for r in subset_query(rules, s.triples())}
            assert got == expected

    def test_depth_equals_cause_size(self, registry):
        tree = RuleTree(registry)
        tree.insert(rule(registry, "r1", HOME_NIGHT_STILL[:2]))
        s = ContextSnapshot(0, attrs(registry, *HOME_NIGHT_STILL))
        assert all(m.depth == 2 for m in tree.query(s))

    def test_insert_delete_round_trip(self):
        reg = small_registry()
        rng = random.Random(42)
        tree = RuleTree(reg)
        base = []
        for i in range(20):
            r = ContextualRule(f"b{i}", random_cause(rng, reg),
                               ServiceId("app", "open"), POSITIVE, "x")
            if tree.insert(r) == "inserted":
                base.append(r)
        extra = ContextualRule("extra", random_cause(rng, reg),
                               ServiceId("other", "open"), POSITIVE, "y")
        tree.insert(extra)
        tree.delete("extra")
        for _ in range(100):
            s = random_snapshot(rng, reg)
            got = {m.rule_id for m in tree.query(s)}
            expected = {r.rule_id for r in subset_query(base, s.triples())}
            assert got == expected


class TestPersistence:
    def test_jsonl_round_trip(self, registry):
        store = RuleStore(registry)
        store.insert(rule(registry, "r1", HOME_NIGHT_STILL))
        store.insert(rule(registry, "r2", HOME_NIGHT_STILL[:1], service=MUSIC,
                          polarity=NEGATIVE))
        text = store.export_jsonl()
        again = RuleStore(registry)
        for r in [ContextualRule.from_dict(__import__("json").loads(line))
                  for line in text.splitlines()]:
            again.insert(r)
        assert again.export_jsonl() == text

    def test_semantics_survive_round_trip(self, registry):
        r = rule(registry, "r1", [("Weather", "temperature", 28)])
        again = ContextualRule.from_dict(r.to_dict())
        attr = next(iter(again.cause))
        assert attr.semantic == "28 degrees Celsius"
