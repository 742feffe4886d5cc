"""Chain services so their typed outputs feed each other until the goal types exist.

States are sets of available types; firing a service whose inputs are all
available adds its outputs. A breadth-first search over states finds plans of
minimum length. Among those it keeps the highest total QoS, then the
lexicographically smallest id sequence. For one state reached at its minimum
depth, the best prefix (highest QoS, smallest ids) dominates every other
prefix, so each state stores a single prefix.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Iterable

from .config import Config
from .keyword_extraction import KeywordSet
from .ontology import CompositionPlan, ConceptGraph, ProcessMemo, memo_lookup, memo_record
from .registry import Registry
from .service_selection import qos_value


@dataclass(frozen=True)
class CompositionGoal:
    available: frozenset[str]
    required: frozenset[str]


@dataclass
class SearchStats:
    """Call counters; shared across threads."""

    searches: int = 0
    memo_hits: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def bump(self, name: str) -> None:
        with self._lock:
            setattr(self, name, getattr(self, name) + 1)


def _ancestors(types: Iterable[str], graph: ConceptGraph | None) -> frozenset[str]:
    out = set(types)
    if graph is None:
        return frozenset(out)
    stack = list(out)
    while stack:
        t = stack.pop()
        for parent in graph.parents(t):
            if parent not in out:
                out.add(parent)
                stack.append(parent)
    return frozenset(out)


def fire(state: frozenset[str], service, isa: ConceptGraph | None = None) -> frozenset[str] | None:
    """The state after firing ``service``, or None when its inputs are missing."""
    have = _ancestors(state, isa) if isa is not None else state
    if not service.inputs <= have:
        return None
    return state | service.outputs


def _satisfied(state: frozenset[str], required: frozenset[str], isa: ConceptGraph | None) -> bool:
    have = _ancestors(state, isa) if isa is not None else state
    return required <= have


def replay(plan: CompositionPlan | Iterable[str], goal: CompositionGoal, reg: Registry,
           isa: ConceptGraph | None = None) -> bool:
    services = plan.services if isinstance(plan, CompositionPlan) else tuple(plan)
    records = [reg[s] for s in services]  # raises UnknownServiceId
    state = goal.available
    for rec in records:
        state = fire(state, rec, isa)
        if state is None:
            return False
    return _satisfied(state, goal.required, isa)


def search(goal: CompositionGoal, reg: Registry, max_depth: int = 4,
           isa: ConceptGraph | None = None) -> CompositionPlan | None:
    if _satisfied(goal.available, goal.required, isa):
        return CompositionPlan(())
    records = [reg.records[i] for i in reg.ids]
    qos = {r.id: qos_value(r.qos) for r in records}
    # state -> (-total_qos, id sequence) of its best prefix
    frontier: dict[frozenset[str], tuple[int, tuple[str, ...]]] = {goal.available: (0, ())}
    seen = {goal.available}
    for _ in range(max_depth):
        nxt: dict[frozenset[str], tuple[int, tuple[str, ...]]] = {}
        for state, (neg_qos, seq) in frontier.items():
            for rec in records:
                after = fire(state, rec, isa)
                if after is None or after == state or after in seen:
                    continue
                cand = (neg_qos - qos[rec.id], seq + (rec.id,))
                if after not in nxt or cand < nxt[after]:
                    nxt[after] = cand
        if not nxt:
            return None
        seen.update(nxt)
        done = [v for s, v in nxt.items() if _satisfied(s, goal.required, isa)]
        if done:
            neg_qos, seq = min(done)
            return CompositionPlan(seq, -neg_qos)
        frontier = nxt
    return None


def compose(goal: CompositionGoal, reg: Registry, memo: ProcessMemo | None, k: KeywordSet,
            cfg: Config | None = None, *, stats: SearchStats | None = None,
            isa: ConceptGraph | None = None, record: bool = True) -> CompositionPlan | None:
    """Resolve ``goal`` from the memo when it still replays, else by search.

    ``isa`` is only consulted when ``compose.use_isa`` is on. A fresh plan is
    written back to the memo unless ``record`` is false.
    """
    cfg = cfg or Config()
    isa = isa if cfg.compose_use_isa else None
    if memo is not None:
        hit = memo_lookup(memo, k)
        if hit is not None and all(s in reg for s in hit.services) and replay(hit, goal, reg, isa):
            if stats:
                stats.bump("memo_hits")
            return CompositionPlan(hit.services, sum(qos_value(reg[s].qos) for s in hit.services))
    if stats:
        stats.bump("searches")
    plan = search(goal, reg, cfg.compose_max_depth, isa)
    if plan is not None and memo is not None and record:
        memo_record(memo, k, plan)
    return plan
