"""Score registry services against a task's keywords over the concept graph.

Each keyword contributes its best match for a service: 1 for an exact concept
the service provides, ``decay ** hops`` for a concept reached by walking up
``hops`` isA edges (at most ``max_hops``), 0 otherwise. A service's score is
the mean contribution over all keywords.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .config import Config
from .errors import UnknownServiceId
from .keyword_extraction import KeywordSet
from .ontology import ConceptGraph
from .registry import Registry


@dataclass(frozen=True)
class Candidate:
    service_id: str
    score: Fraction
    matched_concepts: frozenset[str]
    hop_profile: tuple[tuple[str, int], ...]   # (keyword, hops) sorted by keyword


@dataclass(frozen=True)
class KeywordTrace:
    keyword: str
    concept: str | None
    path: tuple[str, ...]
    hops: int | None
    contribution: Fraction


def generalizations(word: str, g: ConceptGraph, max_hops: int) -> list[tuple[str, tuple[str, ...]]]:
    """Concepts reachable from ``word`` upward, nearest first, with their paths.

    A multiword keyword that is not itself a concept starts from its head noun.
    """
    if word in g.concepts:
        start = [(word, (word,))]
    elif " " in word and max_hops >= 1:
        head = word.rsplit(" ", 1)[1]
        start = [(head, (word, head))] if head in g.concepts else []
    else:
        start = []
    parents: dict[str, list[str]] = {}
    for child, parent in g.is_a:
        parents.setdefault(child, []).append(parent)
    out = []
    seen = {c for c, _ in start}
    queue = deque(start)
    while queue:
        concept, path = queue.popleft()
        out.append((concept, path))
        if len(path) - 1 >= max_hops:
            continue
        for parent in sorted(parents.get(concept, ())):
            if parent not in seen:
                seen.add(parent)
                queue.append((parent, path + (parent,)))
    return out


def _best(word: str, service: str, reach, g: ConceptGraph, decay: Fraction) -> KeywordTrace:
    for concept, path in reach:
        if service in g.provided_by.get(concept, ()):
            hops = len(path) - 1
            return KeywordTrace(word, concept, path, hops, decay ** hops)
    return KeywordTrace(word, None, (), None, Fraction(0))


def match_task(k: KeywordSet, g: ConceptGraph, reg: Registry, cfg: Config | None = None) -> list[Candidate]:
    cfg = cfg or Config()
    words = sorted(k.keywords)
    if not words:
        return []
    reach = {w: generalizations(w, g, cfg.match_max_hops) for w in words}
    services: set[str] = set()
    for r in reach.values():
        for concept, _ in r:
            services |= g.provided_by.get(concept, frozenset())
    out = []
    for sid in sorted(services):
        if sid not in reg:
            continue
        traces = [_best(w, sid, reach[w], g, cfg.match_decay) for w in words]
        score = sum((t.contribution for t in traces), Fraction(0)) / len(words)
        if score > 0 and score >= cfg.match_theta:
            hits = [t for t in traces if t.concept is not None]
            out.append(Candidate(sid, score, frozenset(t.concept for t in hits),
                                 tuple((t.keyword, t.hops) for t in hits)))
    out.sort(key=lambda c: (-c.score, c.service_id))
    return out


def explain_match(k: KeywordSet, g: ConceptGraph, service_id: str,
                  reg: Registry | None = None, cfg: Config | None = None) -> list[KeywordTrace]:
    """Per-keyword account of how ``service_id`` scores against ``k``."""
    cfg = cfg or Config()
    known = service_id in reg if reg is not None else service_id in g.services()
    if not known:
        raise UnknownServiceId(service_id)
    return [_best(w, service_id, generalizations(w, g, cfg.match_max_hops), g, cfg.match_decay)
            for w in sorted(k.keywords)]
