from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpmn_weaver.config import Config
from bpmn_weaver.errors import UnknownServiceId
from bpmn_weaver.keyword_extraction import KeywordSet
from bpmn_weaver.ontology import ConceptGraph
from bpmn_weaver.semantic_matching import explain_match, generalizations, match_task
from generators import concept_graphs, random_concept_graph, registry_of, service
from oracles import brute_force_scores

K = KeywordSet(frozenset({"send"}), frozenset({"confirmation email"}))
G = ConceptGraph(
    frozenset({"send", "confirmation email", "email"}),
    frozenset({("confirmation email", "email")}),
    {"send": {"s1", "s2"}, "confirmation email": {"s1"}, "email": {"s2"}},
    {"send": 2, "confirmation email": 1, "email": 1},
)
REG = registry_of(service("s1"), service("s2"))
THETA0 = Config(match_theta=Fraction(0))


def _scores(cands):
    return {c.service_id: c.score for c in cands}


class TestMatch:
    def test_exact(self):
        assert _scores(match_task(K, G, REG))["s1"] == 1

    def test_generalized(self):
        assert _scores(match_task(K, G, REG))["s2"] == Fraction(3, 4)

    def test_ordering(self):
        assert [c.service_id for c in match_task(K, G, REG)] == ["s1", "s2"]

    def test_hop_profile(self):
        by_id = {c.service_id: c for c in match_task(K, G, REG)}
        assert dict(by_id["s2"].hop_profile) == {"send": 0, "confirmation email": 1}
        assert by_id["s2"].matched_concepts == {"send", "email"}

    def test_empty_keywords(self):
        assert match_task(KeywordSet(), G, REG) == []

    def test_theta_filters(self):
        assert _scores(match_task(K, G, REG, Config(match_theta=Fraction(4, 5)))) == {"s1": 1}

    def test_unregistered_services_skipped(self):
        assert _scores(match_task(K, G, registry_of(service("s2")))) == {"s2": Fraction(3, 4)}

    def test_max_hops_zero_disables_generalization(self):
        cands = match_task(K, G, REG, Config(match_max_hops=0))
        assert _scores(cands) == {"s1": 1, "s2": Fraction(1, 2)}

    def test_specialization_does_not_match(self):
        k = KeywordSet(noun_phrases=frozenset({"email"}))
        g = replace(G, provided_by={"confirmation email": {"s1"}})
        assert match_task(k, g, REG, THETA0) == []

    def test_tie_broken_by_id(self):
        g = ConceptGraph(frozenset({"send"}), frozenset(), {"send": {"b", "a", "c"}}, {})
        reg = registry_of(service("a"), service("b"), service("c"))
        assert [c.service_id for c in match_task(KeywordSet(frozenset({"send"})), g, reg)] == ["a", "b", "c"]


class TestExplain:
    def test_exact_case(self):
        assert [t.hops for t in explain_match(K, G, "s1", REG)] == [0, 0]

    def test_generalized_case(self):
        traces = {t.keyword: t for t in explain_match(K, G, "s2", REG)}
        t = traces["confirmation email"]
        assert t.path == ("confirmation email", "email")
        assert t.contribution == Fraction(1, 2)

    def test_unknown_service(self):
        with pytest.raises(UnknownServiceId):
            explain_match(K, G, "nope", REG)
        with pytest.raises(KeyError):
            explain_match(K, G, "nope")

    @settings(max_examples=150, deadline=None)
    @given(concept_graphs(), st.data())
    def test_accounting_identity(self, g, data):
        words = sorted(g.concepts) + ["zz " + w for w in sorted(g.concepts)]
        chosen = data.draw(st.lists(st.sampled_from(words), min_size=1, max_size=5, unique=True))
        k = KeywordSet(noun_phrases=frozenset(chosen))
        reg = registry_of(*(service(s) for s in sorted(g.services())))
        for c in match_task(k, g, reg, THETA0):
            total = sum(t.contribution for t in explain_match(k, g, c.service_id, reg, THETA0))
            assert total == c.score * len(k.keywords)


def _check_against_oracle(k, g, cfg):
    reg = registry_of(*(service(s) for s in sorted(g.services())))
    got = match_task(k, g, reg, cfg)
    expected = brute_force_scores(k.keywords, g.concepts, g.is_a, g.provided_by,
                                  cfg.match_decay, cfg.match_max_hops)
    assert _scores(got) == expected
    assert [c.service_id for c in got] == sorted(expected, key=lambda s: (-expected[s], s))
    for c in got:
        assert 0 < c.score <= 1 and c.matched_concepts
        assert all(h <= cfg.match_max_hops for _, h in c.hop_profile)


@settings(max_examples=200, deadline=None)
@given(concept_graphs(), st.data())
def test_brute_force_equivalence(g, data):
    words = sorted(g.concepts) + ["zz " + w for w in sorted(g.concepts)] + ["unknown"]
    chosen = data.draw(st.lists(st.sampled_from(words), max_size=6, unique=True))
    k = KeywordSet(noun_phrases=frozenset(chosen))
    _check_against_oracle(k, g, THETA0)


def test_brute_force_on_deeper_graphs():
    rng = random.Random(5)
    for _ in range(150):
        g = random_concept_graph(rng)
        pool = sorted(g.concepts) + ["q " + c for c in sorted(g.concepts) if " " not in c]
        k = KeywordSet(frozenset(rng.sample(pool, rng.randint(1, min(5, len(pool))))))
        cfg = Config(match_theta=Fraction(0), match_max_hops=rng.randint(0, 3),
                     match_decay=Fraction(rng.randint(1, 9), 10))
        _check_against_oracle(k, g, cfg)


@settings(max_examples=150, deadline=None)
@given(concept_graphs(), st.data())
def test_monotone_in_links(g, data):
    words = sorted(g.concepts)
    k = KeywordSet(noun_phrases=frozenset(data.draw(st.lists(st.sampled_from(words), min_size=1, max_size=4))))
    concept = data.draw(st.sampled_from(words))
    sid = data.draw(st.sampled_from(["s0", "s1", "s9"]))
    links = dict(g.provided_by)
    links[concept] = links.get(concept, frozenset()) | {sid}
    g2 = replace(g, provided_by=links)
    reg = registry_of(*(service(s) for s in sorted(g2.services())))
    before, after = _scores(match_task(k, g, reg, THETA0)), _scores(match_task(k, g2, reg, THETA0))
    for s, score in before.items():
        assert after[s] >= score


def test_generalizations_nearest_first():
    g = ConceptGraph(frozenset({"a b", "b", "c", "d"}), frozenset({("a b", "b"), ("b", "c"), ("c", "d")}), {}, {})
    assert [c for c, _ in generalizations("a b", g, 2)] == ["a b", "b", "c"]
    assert [c for c, _ in generalizations("x b", g, 2)] == ["b", "c"]
    assert generalizations("x b", g, 0) == []
