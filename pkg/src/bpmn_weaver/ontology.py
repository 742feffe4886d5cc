"""Service/domain concept graph, baseline pruning, triple files and the composition memo."""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import EmptyRegistry, MalformedTriple
from .keyword_extraction import DEFAULT_CHUNK_PATTERN, KeywordSet, Lexicon, keyword_counts
from .registry import Registry

PREDICATES = ("freq", "isA", "isDomain", "providedBy")


@dataclass(frozen=True)
class ConceptGraph:
    concepts: frozenset[str] = frozenset()
    is_a: frozenset[tuple[str, str]] = frozenset()        # (child, parent)
    provided_by: Mapping[str, frozenset[str]] = field(default_factory=dict)
    freq: Mapping[str, int] = field(default_factory=dict)
    domain_concepts: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "provided_by",
                           {c: frozenset(s) for c, s in self.provided_by.items() if s})
        object.__setattr__(self, "freq", {c: self.freq.get(c, 0) for c in self.concepts})

    __hash__ = None

    def parents(self, concept: str) -> list[str]:
        return sorted(p for c, p in self.is_a if c == concept)

    def services(self) -> frozenset[str]:
        out: set[str] = set()
        for ids in self.provided_by.values():
            out |= ids
        return frozenset(out)

    def check(self) -> list[str]:
        """Invariant violations, as human-readable strings."""
        problems = []
        for c in set(self.provided_by) | set(self.freq) | set(self.domain_concepts):
            if c not in self.concepts:
                problems.append(f"{c!r} used but not a concept")
        for child, parent in self.is_a:
            if child not in self.concepts or parent not in self.concepts:
                problems.append(f"isA edge {child!r}->{parent!r} leaves the concept set")
        for c in self.concepts:
            if " " in c and (c, c.rsplit(" ", 1)[1]) not in self.is_a:
                problems.append(f"multiword concept {c!r} lacks its head-noun edge")
        if _has_cycle(self.is_a):
            problems.append("isA edges contain a cycle")
        return problems


def _has_cycle(edges) -> bool:
    succ: dict[str, list[str]] = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
    state: dict[str, int] = {}

    def visit(node: str) -> bool:
        state[node] = 1
        for nxt in succ.get(node, ()):
            mark = state.get(nxt, 0)
            if mark == 1 or (mark == 0 and visit(nxt)):
                return True
        state[node] = 2
        return False

    return any(state.get(n, 0) == 0 and visit(n) for n in list(succ))


def build_service_ontology(reg: Registry, lexicon: Lexicon | None = None,
                           pattern: str = DEFAULT_CHUNK_PATTERN) -> ConceptGraph:
    """Learn concepts from every service description in ``reg``.

    Verbs and noun phrases become concepts linked to the service; a multiword
    phrase also gets an isA edge to its head noun, which is added as a concept
    (with no occurrences of its own unless it appears alone somewhere).
    """
    if not len(reg):
        raise EmptyRegistry("cannot build an ontology from an empty registry")
    freq: Counter = Counter()
    provided: dict[str, set[str]] = {}
    domain: set[str] = set()
    for rec in reg.records.values():
        verbs, phrases = keyword_counts(rec.description, lexicon, pattern)
        freq.update(verbs)
        freq.update(phrases)
        for concept in list(verbs) + list(phrases):
            provided.setdefault(concept, set()).add(rec.id)
        domain.update(phrases)
    is_a = set()
    for phrase in list(domain):
        if " " in phrase:
            head = phrase.rsplit(" ", 1)[1]
            is_a.add((phrase, head))
            domain.add(head)
    concepts = frozenset(set(freq) | domain)
    return ConceptGraph(concepts, frozenset(is_a), provided, dict(freq), frozenset(domain))


def prune_baseline(g: ConceptGraph) -> ConceptGraph:
    """Drop concepts whose frequency is below the mean, keeping ancestors of survivors."""
    if not g.concepts:
        return g
    mean = Fraction(sum(g.freq.values()), len(g.concepts))
    keep = {c for c in g.concepts if g.freq[c] >= mean}
    parents: dict[str, set[str]] = {}
    for child, parent in g.is_a:
        parents.setdefault(child, set()).add(parent)
    stack = list(keep)
    while stack:
        for parent in parents.get(stack.pop(), ()):
            if parent not in keep:
                keep.add(parent)
                stack.append(parent)
    return ConceptGraph(
        concepts=frozenset(keep),
        is_a=frozenset((c, p) for c, p in g.is_a if c in keep and p in keep),
        provided_by={c: s for c, s in g.provided_by.items() if c in keep},
        freq={c: n for c, n in g.freq.items() if c in keep},
        domain_concepts=g.domain_concepts & keep,
    )


# ---------------------------------------------------------------- triple files


def save_triples(g: ConceptGraph) -> str:
    triples = []
    for c in g.concepts:
        triples.append((c, "freq", str(g.freq[c])))
    triples += [(c, "isA", p) for c, p in g.is_a]
    triples += [(c, "providedBy", s) for c, ids in g.provided_by.items() for s in ids]
    triples += [(c, "isDomain", "true") for c in g.domain_concepts]
    return "".join(f"{s}\t{p}\t{o}\n" for s, p, o in sorted(triples))


def load_triples(text: str) -> ConceptGraph:
    concepts: set[str] = set()
    is_a: set[tuple[str, str]] = set()
    provided: dict[str, set[str]] = {}
    freq: dict[str, int] = {}
    domain: set[str] = set()
    for no, line in enumerate(text.split("\n"), 1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not parts[0] or not parts[2]:
            raise MalformedTriple(no, "expected subject<TAB>predicate<TAB>object")
        subj, pred, obj = parts
        if pred not in PREDICATES:
            raise MalformedTriple(no, f"unknown predicate {pred!r}")
        concepts.add(subj)
        if pred == "freq":
            if not obj.isdigit():
                raise MalformedTriple(no, f"frequency must be a nonnegative integer, got {obj!r}")
            freq[subj] = int(obj)
        elif pred == "isA":
            concepts.add(obj)
            is_a.add((subj, obj))
        elif pred == "providedBy":
            provided.setdefault(subj, set()).add(obj)
        elif obj == "true":
            domain.add(subj)
        else:
            raise MalformedTriple(no, f"isDomain object must be 'true', got {obj!r}")
    return ConceptGraph(frozenset(concepts), frozenset(is_a), provided, freq, frozenset(domain))


# ---------------------------------------------------------------- process memo


@dataclass(frozen=True)
class CompositionPlan:
    services: tuple[str, ...] = ()
    total_qos: int = 0

    @property
    def length(self) -> int:
        return len(self.services)


class ProcessMemo:
    """Previously validated compositions, keyed by the canonical keyword key.

    Single writer, many readers: all access goes through one lock.
    """

    def __init__(self, entries: Mapping[str, tuple[str, ...]] | None = None) -> None:
        self._entries: dict[str, tuple[str, ...]] = dict(entries or {})
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> dict[str, tuple[str, ...]]:
        with self._lock:
            return dict(self._entries)

    def lookup(self, key: str) -> tuple[str, ...] | None:
        with self._lock:
            return self._entries.get(key)

    def record(self, key: str, services: tuple[str, ...]) -> None:
        with self._lock:
            self._entries[key] = tuple(services)

    def dumps(self) -> str:
        return "".join(f"{k}\t{','.join(v)}\n" for k, v in sorted(self.entries().items()))

    @classmethod
    def loads(cls, text: str) -> ProcessMemo:
        entries = {}
        for no, line in enumerate(text.split("\n"), 1):
            if not line:
                continue
            if line.count("\t") != 1:
                raise MalformedTriple(no, "memo lines are key<TAB>svc1,svc2,...")
            key, ids = line.split("\t")
            entries[key] = tuple(i for i in ids.split(",") if i)
        return cls(entries)


def memo_lookup(m: ProcessMemo, k: KeywordSet) -> CompositionPlan | None:
    services = m.lookup(k.canonical_key())
    return None if services is None else CompositionPlan(services)


def memo_record(m: ProcessMemo, k: KeywordSet, p: CompositionPlan) -> ProcessMemo:
    m.record(k.canonical_key(), p.services)
    return m
