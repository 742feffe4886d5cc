"""Process documents: parse the design dialect, validate, and emit the implemented form."""

from __future__ import annotations

import heapq
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

from .errors import GraphInvalid, MalformedXml, SchemaViolation

NODE_KINDS = ("task", "startEvent", "endEvent", "exclusiveGateway", "parallelGateway")
UNRESOLVED_REASONS = ("NO_MATCH", "COMPOSITION_FAILED")


@dataclass(frozen=True)
class Binding:
    kind: str
    services: tuple[str, ...]
    matched_concepts: frozenset[str] = frozenset()
    qos: int = 0
    score: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.kind == "single" and len(self.services) != 1:
            raise ValueError("a single binding names exactly one service")
        if self.kind == "composite" and len(self.services) < 2:
            raise ValueError("a composite binding names at least two services")
        if self.kind not in ("single", "composite"):
            raise ValueError(f"unknown binding kind {self.kind!r}")
        if not 0 <= self.score <= 1:
            raise ValueError("binding score must lie in [0, 1]")


@dataclass(frozen=True)
class TaskIO:
    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    name: str = ""
    description: str = ""
    io: TaskIO | None = None
    binding: Binding | None = None
    unresolved: str | None = None

    @property
    def is_task(self) -> bool:
        return self.kind == "task"


@dataclass(frozen=True)
class FlowEdge:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Diagnostic:
    code: str
    ident: str | None
    reason: str = ""


@dataclass(frozen=True)
class ProcessGraph:
    process_id: str
    nodes: tuple[Node, ...]
    edges: tuple[FlowEdge, ...]
    process_inputs: frozenset[str] = frozenset()
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {n.id: n for n in self.nodes})

    def node(self, ident: str) -> Node:
        return self._index[ident]

    @property
    def tasks(self) -> tuple[Node, ...]:
        return tuple(n for n in self.nodes if n.is_task)

    def successors(self) -> dict[str, list[str]]:
        succ: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.source in succ:
                succ[e.source].append(e.target)
        return succ

    def with_nodes(self, nodes: Iterable[Node]) -> ProcessGraph:
        return replace(self, nodes=tuple(nodes))

    def strip_bindings(self) -> ProcessGraph:
        return self.with_nodes(replace(n, binding=None, unresolved=None) for n in self.nodes)

    def canonical(self):
        """Order-independent value used to compare graphs up to document order."""
        return (
            self.process_id,
            frozenset(self.nodes),
            frozenset(self.edges),
            self.process_inputs,
        )


# ---------------------------------------------------------------- parsing


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _split_list(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _require(el: ET.Element, attr: str) -> str:
    value = el.get(attr)
    if value is None:
        raise SchemaViolation(f"<{_local(el.tag)}> is missing required attribute {attr!r}",
                              el.get("id"))
    return value


def _parse_score(text: str, ident: str) -> Fraction:
    try:
        return Fraction(text)
    except ValueError:
        raise SchemaViolation(f"bad binding score {text!r}", ident) from None


def _parse_task(el: ET.Element) -> Node:
    ident = _require(el, "id")
    description = None
    io = binding = unresolved = None
    for child in el:
        tag = _local(child.tag)
        if tag == "description":
            if len(child):
                raise SchemaViolation("<description> must contain text only", ident)
            description = child.text or ""
        elif tag == "io":
            io = TaskIO(_split_list(child.get("inputs")), _split_list(child.get("outputs")))
        elif tag == "binding":
            try:
                qos = int(_require(child, "qos"))
                binding = Binding(
                    kind=_require(child, "kind"),
                    services=_split_list(_require(child, "services")),
                    qos=qos,
                    score=_parse_score(_require(child, "score"), ident),
                )
            except ValueError as exc:
                raise SchemaViolation(f"task {ident}: {exc}", ident) from None
        elif tag == "unresolved":
            unresolved = _require(child, "reason")
            if unresolved not in UNRESOLVED_REASONS:
                raise SchemaViolation(f"unknown unresolved reason {unresolved!r}", ident)
        else:
            raise SchemaViolation(f"unknown element <{tag}> in task {ident}", ident)
    if description is None:
        raise SchemaViolation(f"task {ident} has no <description>", ident)
    return Node(ident, "task", el.get("name", ""), description, io, binding, unresolved)


def parse_design(xml_text: str) -> ProcessGraph:
    """Parse a design (or implemented) process document into a validated graph."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if _local(root.tag) != "process":
        raise SchemaViolation(f"root element must be <process>, got <{_local(root.tag)}>")
    process_id = _require(root, "id")
    nodes: list[Node] = []
    edges: list[FlowEdge] = []
    for el in root:
        tag = _local(el.tag)
        if tag == "task":
            nodes.append(_parse_task(el))
        elif tag in NODE_KINDS:
            if len(el):
                raise SchemaViolation(f"<{tag}> takes no children", el.get("id"))
            nodes.append(Node(_require(el, "id"), tag, el.get("name", "")))
        elif tag == "sequenceFlow":
            edges.append(FlowEdge(_require(el, "id"), _require(el, "source"), _require(el, "target")))
        else:
            raise SchemaViolation(f"unknown element <{tag}>", el.get("id"))
    graph = ProcessGraph(process_id, tuple(nodes), tuple(edges),
                         frozenset(_split_list(root.get("inputs"))))
    problems = validate(graph)
    if problems:
        first = problems[0]
        raise GraphInvalid(f"{first.code}: {first.reason}", first.ident, problems)
    return graph


# ---------------------------------------------------------------- validation


def validate(graph: ProcessGraph) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    seen: set[str] = set()
    for ident in [n.id for n in graph.nodes] + [e.id for e in graph.edges]:
        if ident in seen:
            out.append(Diagnostic("DuplicateId", ident, "identifier used more than once"))
        seen.add(ident)

    starts = [n for n in graph.nodes if n.kind == "startEvent"]
    if not starts:
        out.append(Diagnostic("NoStart", graph.process_id, "no start event"))
    for extra in starts[1:]:
        out.append(Diagnostic("MultipleStart", extra.id, "more than one start event"))
    if not any(n.kind == "endEvent" for n in graph.nodes):
        out.append(Diagnostic("NoEnd", graph.process_id, "no end event"))

    node_ids = {n.id for n in graph.nodes}
    for e in graph.edges:
        for end in (e.source, e.target):
            if end not in node_ids:
                out.append(Diagnostic("DanglingEdge", e.id, f"references unknown node {end!r}"))
        if e.source == e.target:
            out.append(Diagnostic("SelfLoop", e.id, "edge source equals target"))

    for n in graph.nodes:
        if n.is_task and not n.description.strip():
            out.append(Diagnostic("EmptyDescription", n.id, "task description is empty"))
        if not n.is_task and (n.binding or n.unresolved):
            out.append(Diagnostic("BindingOnNonTask", n.id, "only tasks carry bindings"))
        if n.binding and n.unresolved:
            out.append(Diagnostic("BindingConflict", n.id, "both bound and unresolved"))

    if starts:
        succ = graph.successors()
        reached = {starts[0].id}
        stack = [starts[0].id]
        while stack:
            for nxt in succ.get(stack.pop(), ()):
                if nxt in node_ids and nxt not in reached:
                    reached.add(nxt)
                    stack.append(nxt)
        for n in graph.nodes:
            if n.id not in reached and n.kind != "startEvent":
                out.append(Diagnostic("Unreachable", n.id, "not reachable from the start event"))
    return out


# ---------------------------------------------------------------- ordering


def topological_order(graph: ProcessGraph) -> list[str]:
    """Node ids in topological order, ties broken by document order.

    Cycles (loops through gateways) are cut at the earliest pending node in
    document order whose predecessors are partly visited.
    """
    position = {n.id: i for i, n in enumerate(graph.nodes)}
    indeg = {n.id: 0 for n in graph.nodes}
    succ = graph.successors()
    preds: dict[str, set[str]] = {n.id: set() for n in graph.nodes}
    for e in graph.edges:
        if e.source in indeg and e.target in indeg:
            indeg[e.target] += 1
            preds[e.target].add(e.source)
    heap = [(position[i], i) for i, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    done: set[str] = set()
    while len(order) < len(indeg):
        if not heap:
            pending = [i for i in indeg if i not in done]
            cut = min(pending, key=lambda i: (not (preds[i] & done), position[i]))
            indeg[cut] = 0
            heapq.heappush(heap, (position[cut], cut))
        _, ident = heapq.heappop(heap)
        if ident in done:
            continue
        done.add(ident)
        order.append(ident)
        for nxt in succ[ident]:
            if nxt in done or nxt not in indeg:
                continue
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (position[nxt], nxt))
    return order


def ranks(graph: ProcessGraph) -> dict[str, int]:
    """Longest forward-path depth of every node along ``topological_order``."""
    order = topological_order(graph)
    where = {ident: i for i, ident in enumerate(order)}
    rank = {ident: 0 for ident in order}
    succ = graph.successors()
    for ident in order:
        for nxt in succ[ident]:
            if nxt in where and where[nxt] > where[ident]:
                rank[nxt] = max(rank[nxt], rank[ident] + 1)
    return rank


# ---------------------------------------------------------------- emission


def _attr(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;").replace("\t", "&#9;").replace("\n", "&#10;")
            .replace("\r", "&#13;"))


def _text(value: str) -> str:
    return (value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace("\r", "&#13;"))


def format_score(score: Fraction) -> str:
    hundredths = round(Fraction(score) * 100)
    return f"{hundredths // 100}.{hundredths % 100:02d}"


def _tag(name: str, attrs: list[tuple[str, str]], close: bool = True) -> str:
    body = "".join(f' {k}="{_attr(v)}"' for k, v in attrs)
    return f"<{name}{body}{'/' if close else ''}>"


def emit_implemented(graph: ProcessGraph) -> str:
    """Serialize ``graph``; the output is a pure function of the graph value."""
    lines = ['<?xml version="1.0" encoding="UTF-8"?>']
    attrs = [("id", graph.process_id)]
    if graph.process_inputs:
        attrs.append(("inputs", ",".join(sorted(graph.process_inputs))))
    lines.append(_tag("process", attrs, close=False))
    for n in graph.nodes:
        if not n.is_task:
            attrs = [("id", n.id)] + ([("name", n.name)] if n.name else [])
            lines.append("  " + _tag(n.kind, attrs))
            continue
        lines.append("  " + _tag("task", [("id", n.id), ("name", n.name)], close=False))
        lines.append(f"    <description>{_text(n.description)}</description>")
        if n.io is not None:
            lines.append("    " + _tag("io", [("inputs", ",".join(n.io.inputs)),
                                              ("outputs", ",".join(n.io.outputs))]))
        if n.binding is not None:
            b = n.binding
            lines.append("    " + _tag("binding", [
                ("kind", b.kind), ("services", ",".join(b.services)),
                ("score", format_score(b.score)), ("qos", str(b.qos))]))
        elif n.unresolved is not None:
            lines.append("    " + _tag("unresolved", [("reason", n.unresolved)]))
        lines.append("  </task>")
    for e in graph.edges:
        lines.append("  " + _tag("sequenceFlow", [("id", e.id), ("source", e.source),
                                                  ("target", e.target)]))
    lines.append("</process>")
    return "\n".join(lines) + "\n"
