from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from bpmn_weaver.bpmn_model import (Binding, FlowEdge, Node, ProcessGraph, emit_implemented, parse_design,
                                    ranks, topological_order, validate)
from bpmn_weaver.errors import GraphInvalid, MalformedXml, SchemaViolation
from conftest import DATA
from generators import process_graphs
from oracles import dom_task_order

MINIMAL = """<process id="p1">
  <startEvent id="s"/>
  <task id="t1" name="Send invoice"><description>send invoice</description></task>
  <endEvent id="e"/>
  <sequenceFlow id="f1" source="s" target="t1"/>
  <sequenceFlow id="f2" source="t1" target="e"/>
</process>"""


def _graph(nodes, edges):
    return ProcessGraph("p", tuple(nodes), tuple(FlowEdge(*e) for e in edges))


class TestParseDesign:
    def test_minimal_instance(self):
        g = parse_design(MINIMAL)
        assert len(g.nodes) == 3 and len(g.edges) == 2
        t1 = g.node("t1")
        assert t1.is_task and t1.description == "send invoice" and t1.binding is None

    def test_truncated_text_is_malformed(self):
        with pytest.raises(MalformedXml):
            parse_design("<process")

    def test_order_fixture(self, order_xml, order_design):
        assert len(order_design.nodes) == 9
        assert [t.id for t in order_design.tasks] == ["t1", "t2", "t3", "t4", "t5"]
        assert sum(n.kind == "exclusiveGateway" for n in order_design.nodes) == 1
        topo = [i for i in topological_order(order_design) if order_design.node(i).is_task]
        assert topo == ["t1", "t2", "t3", "t4", "t5"]
        assert topo == dom_task_order(order_xml)

    def test_inputs_and_io(self, order_design):
        assert order_design.process_inputs == {"webOrder"}
        assert order_design.node("t5").io.outputs == ("pickupConfirmation",)
        assert order_design.node("t5").io.inputs == ()

    def test_description_whitespace_preserved(self):
        text = MINIMAL.replace("send invoice</description>", "  send\n\t the   invoice </description>")
        assert parse_design(text).node("t1").description == "  send\n\t the   invoice "

    @pytest.mark.parametrize("bad, ident", [
        ('<process id="p"><startEvent id="s"/><foo id="x"/></process>', "x"),
        ('<process id="p"><startEvent/></process>', None),
        ('<process id="p"><startEvent id="s"/><task id="t"/></process>', "t"),
        ('<process id="p"><startEvent id="s"/><sequenceFlow id="f" source="s"/></process>', "f"),
        ('<definitions id="p"/>', None),
    ])
    def test_schema_violations(self, bad, ident):
        with pytest.raises(SchemaViolation) as err:
            parse_design(bad)
        assert err.value.ident == ident

    @pytest.mark.parametrize("mutate, code, ident", [
        (lambda x: x.replace('<endEvent id="e"/>', '<endEvent id="t1"/>'), "DuplicateId", "t1"),
        (lambda x: x.replace('<endEvent id="e"/>', '<endEvent id="e"/><task id="t9"><description>x</description></task>'),
         "Unreachable", "t9"),
        (lambda x: x.replace('<endEvent id="e"/>', '<endEvent id="e"/><startEvent id="s2"/>'),
         "MultipleStart", "s2"),
        (lambda x: x.replace('<startEvent id="s"/>', "").replace(
            '<sequenceFlow id="f1" source="s" target="t1"/>', ""), "NoStart", "p1"),
        (lambda x: x.replace('target="e"', 'target="t1"'), "SelfLoop", "f2"),
    ])
    def test_graph_invalid_carries_identifier(self, mutate, code, ident):
        with pytest.raises(GraphInvalid) as err:
            parse_design(mutate(MINIMAL))
        assert (code, ident) in [(d.code, d.ident) for d in err.value.diagnostics]


class TestValidate:
    start, end = Node("s", "startEvent"), Node("e", "endEvent")
    task = Node("t1", "task", "n", "do it")

    def test_valid_graph(self):
        assert validate(_graph([self.start, self.task, self.end],
                               [("f1", "s", "t1"), ("f2", "t1", "e")])) == []

    def test_two_start_events(self):
        g = _graph([self.start, Node("s2", "startEvent"), self.task, self.end],
                   [("f1", "s", "t1"), ("f2", "t1", "e"), ("f3", "s2", "t1")])
        assert [d.code for d in validate(g)] == ["MultipleStart"]

    def test_orphan_task(self):
        g = _graph([self.start, self.task, self.end, Node("t9", "task", "", "x")],
                   [("f1", "s", "t1"), ("f2", "t1", "e")])
        [diag] = validate(g)
        assert (diag.code, diag.ident) == ("Unreachable", "t9")

    def test_parallel_edges_allowed(self):
        g = _graph([self.start, self.task, self.end],
                   [("f1", "s", "t1"), ("f2", "t1", "e"), ("f3", "t1", "e")])
        assert validate(g) == []


class TestEmit:
    def _bound(self):
        g = parse_design(MINIMAL)
        b = Binding("single", ("svc-email",), frozenset({"send"}), -1, Fraction(3, 4))
        return g.with_nodes(n if not n.is_task else replace(n, binding=b) for n in g.nodes)

    def test_golden(self):
        out = emit_implemented(self._bound())
        assert out == (DATA / "golden_bound_3node.xml").read_text(encoding="utf-8")
        assert '<binding kind="single" services="svc-email"' in out

    def test_deterministic(self):
        g = self._bound()
        assert emit_implemented(g) == emit_implemented(g)
        assert "\r" not in emit_implemented(g)

    def test_round_trip_strips_to_design(self):
        design = parse_design(MINIMAL)
        assert parse_design(emit_implemented(self._bound())).strip_bindings() == design

    def test_unresolved_annotation(self):
        g = parse_design(MINIMAL)
        g = g.with_nodes(replace(n, unresolved="NO_MATCH") if n.is_task else n for n in g.nodes)
        out = emit_implemented(g)
        assert '<unresolved reason="NO_MATCH"/>' in out
        assert parse_design(out).node("t1").unresolved == "NO_MATCH"


class TestBinding:
    def test_single_needs_one_service(self):
        with pytest.raises(ValueError):
            Binding("single", ("a", "b"))

    def test_composite_needs_two(self):
        with pytest.raises(ValueError):
            Binding("composite", ("a",))


class TestOrdering:
    def test_ranks_on_fixture(self, order_design):
        r = ranks(order_design)
        assert r["t3"] == r["t5"] == r["gw1"] + 1
        assert r["t4"] == r["t3"] + 1

    def test_loop_is_cut_deterministically(self):
        g = _graph([Node("s", "startEvent"), Node("a", "task", "", "x"), Node("gw", "exclusiveGateway"),
                    Node("b", "task", "", "y"), Node("e", "endEvent")],
                   [("1", "s", "a"), ("2", "a", "gw"), ("3", "gw", "b"), ("4", "b", "a"), ("5", "gw", "e")])
        assert topological_order(g) == ["s", "a", "gw", "b", "e"]


@settings(max_examples=150, deadline=None)
@given(process_graphs())
def test_random_round_trip(g):
    assert validate(g) == []
    text = emit_implemented(g)
    back = parse_design(text)
    assert back == g
    assert emit_implemented(back) == text
