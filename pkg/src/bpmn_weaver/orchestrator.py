"""End-to-end resolution of a design process into an implemented one.

Per task: extract keywords, match against the ontology, select by QoS when
there are candidates, otherwise compose. Tasks are visited rank by rank in
topological order; a rank sees the outputs of every task bound in earlier
ranks, and memo writes from a rank are committed (in task order) only after
the whole rank is resolved. That makes threaded execution within a rank
produce exactly what a single thread produces.
"""

from __future__ import annotations

import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import groupby

from .bpmn_model import Binding, ProcessGraph, format_score, ranks, topological_order, validate
from .config import Config
from .errors import InvalidDesign, OntologyRegistryMismatch
from .keyword_extraction import KeywordSet, Lexicon, extract_keywords, normalize
from .ontology import CompositionPlan, ConceptGraph, ProcessMemo, memo_record
from .registry import Registry
from .semantic_matching import Candidate, match_task
from .service_composition import CompositionGoal, SearchStats, compose
from .service_selection import qos_value, select_best


@dataclass(frozen=True)
class Outcome:
    kind: str                               # boundSingle | boundComposite | unresolved
    services: tuple[str, ...] = ()
    score: Fraction = Fraction(0)
    qos: int = 0
    reason: str | None = None

    def as_dict(self) -> dict:
        if self.kind == "boundSingle":
            return {"outcome": self.kind, "service": self.services[0],
                    "score": format_score(self.score), "qos": self.qos}
        if self.kind == "boundComposite":
            return {"outcome": self.kind, "services": list(self.services),
                    "length": len(self.services), "totalQos": self.qos}
        return {"outcome": self.kind, "reason": self.reason}


@dataclass(frozen=True)
class ResolutionReport:
    per_task: tuple[tuple[str, Outcome], ...]
    config_echo: tuple[tuple[str, str], ...]

    @property
    def outcomes(self) -> dict[str, Outcome]:
        return dict(self.per_task)

    @property
    def counters(self) -> dict[str, int]:
        kinds = [o.kind for _, o in self.per_task]
        return {
            "tasks": len(kinds),
            "matched": kinds.count("boundSingle"),
            "composed": kinds.count("boundComposite"),
            "failed": kinds.count("unresolved"),
        }

    def to_json(self) -> str:
        body = {
            "tasks": {tid: o.as_dict() for tid, o in self.per_task},
            "counters": self.counters,
            "config": dict(self.config_echo),
        }
        return json.dumps(body, indent=2) + "\n"


@dataclass
class Instrumentation:
    """Per-task log of what the resolver did; lets tests check the branch structure."""

    matched: dict[str, int] = field(default_factory=dict)       # task -> #candidates
    composed: set[str] = field(default_factory=set)             # tasks that entered composition
    stats: SearchStats = field(default_factory=SearchStats)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def note_match(self, task: str, n: int) -> None:
        with self._lock:
            self.matched[task] = n

    def note_compose(self, task: str) -> None:
        with self._lock:
            self.composed.add(task)


@dataclass(frozen=True)
class _Resolution:
    outcome: Outcome
    binding: Binding | None
    outputs: frozenset[str]
    memo_write: tuple[KeywordSet, CompositionPlan] | None = None


def task_text(node, cfg: Config) -> str:
    return f"{node.description} {node.name}" if cfg.use_name and node.name else node.description


def derive_goal(node, k: KeywordSet, available: frozenset[str], reg: Registry) -> CompositionGoal:
    """Declared task IO wins; otherwise head nouns that name a registry type."""
    avail = set(available)
    if node.io is not None:
        avail |= set(node.io.inputs)
    if node.io is not None and node.io.outputs:
        required = frozenset(node.io.outputs)
    else:
        by_stem: dict[str, set[str]] = {}
        for t in reg.type_vocabulary():
            by_stem.setdefault(normalize(t), set()).add(t)
        required = frozenset(t for h in k.head_nouns for t in by_stem.get(h, ()))
    return CompositionGoal(frozenset(avail), required)


def _resolve_task(node, available, reg, graph, memo, cfg, lexicon, inst) -> _Resolution:
    k = extract_keywords(task_text(node, cfg), lexicon, cfg.chunk_pattern)
    cands: list[Candidate] = match_task(k, graph, reg, cfg)
    inst.note_match(node.id, len(cands))
    if cands:
        best = select_best(cands, reg, cfg.select_score_first)
        cand = next(c for c in cands if c.service_id == best)
        q = qos_value(reg[best].qos)
        binding = Binding("single", (best,), cand.matched_concepts, q, cand.score)
        return _Resolution(Outcome("boundSingle", (best,), cand.score, q), binding,
                           reg[best].outputs)

    inst.note_compose(node.id)
    goal = derive_goal(node, k, available, reg)
    if not goal.required:
        return _Resolution(Outcome("unresolved", reason="NO_MATCH"), None, frozenset())
    plan = compose(goal, reg, memo, k, cfg, stats=inst.stats, isa=graph, record=False)
    if plan is None or plan.length == 0:
        return _Resolution(Outcome("unresolved", reason="COMPOSITION_FAILED"), None, frozenset())
    kind = "single" if plan.length == 1 else "composite"
    binding = Binding(kind, plan.services, frozenset(), plan.total_qos, Fraction(0))
    outputs = frozenset().union(*(reg[s].outputs for s in plan.services))
    # memo_write is set only for fresh searches: a memo hit leaves the memo as is
    fresh = memo is None or memo.lookup(k.canonical_key()) != plan.services
    return _Resolution(Outcome("boundComposite", plan.services, Fraction(0), plan.total_qos),
                       binding, outputs, (k, plan) if fresh else None)


def check_ontology(graph: ConceptGraph, reg: Registry) -> None:
    missing = graph.services() - set(reg.records)
    if missing:
        raise OntologyRegistryMismatch(missing)


def implement_process(design: ProcessGraph, reg: Registry, graph: ConceptGraph,
                      memo: ProcessMemo | None = None, cfg: Config | None = None, *,
                      lexicon: Lexicon | None = None,
                      instrumentation: Instrumentation | None = None
                      ) -> tuple[ProcessGraph, ResolutionReport]:
    cfg = cfg or Config()
    inst = instrumentation if instrumentation is not None else Instrumentation()
    problems = validate(design)
    if problems:
        raise InvalidDesign(problems)
    check_ontology(graph, reg)
    design = design.strip_bindings()

    rank = ranks(design)
    topo = [i for i in topological_order(design) if design.node(i).is_task]
    order = sorted(topo, key=rank.get)  # stable: topological order within a rank
    available = frozenset(design.process_inputs)
    results: dict[str, _Resolution] = {}
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for _, group in groupby(order, key=rank.get):
            tasks = [design.node(i) for i in group]

            def run(node, available=available):
                return _resolve_task(node, available, reg, graph, memo, cfg, lexicon, inst)

            done = list(pool.map(run, tasks)) if pool else [run(n) for n in tasks]
            for node, res in zip(tasks, done):
                results[node.id] = res
                available |= res.outputs
                if res.memo_write and memo is not None:
                    memo_record(memo, *res.memo_write)
    finally:
        if pool:
            pool.shutdown()

    nodes = []
    for n in design.nodes:
        if n.is_task:
            res = results[n.id]
            n = replace(n, binding=res.binding, unresolved=res.outcome.reason)
        nodes.append(n)
    # the worker count cannot change any result, so it stays out of the report
    echo = tuple((k, v) for k, v in cfg.items() if k != "orchestrator.workers")
    report = ResolutionReport(tuple((i, results[i].outcome) for i in topo), echo)
    return design.with_nodes(nodes), report
