"""Brute-force reference implementations. Deliberately naive and independent of the package."""

from __future__ import annotations

import itertools
import math
import xml.dom.minidom
from fractions import Fraction


def best_service_scan(cands, stats):
    """stats: id -> (available, calls, response_sum). Linear scan with explicit comparisons."""
    best = None
    for sid in cands:
        a, n, total = stats[sid]
        qos = a - n
        avg = total / n if n else math.inf
        if best is None:
            best = (sid, qos, avg)
            continue
        _, bq, bavg = best
        if qos > bq or (qos == bq and avg < bavg) or (qos == bq and avg == bavg and sid < best[0]):
            best = (sid, qos, avg)
    return best[0] if best else None


def enumerate_compositions(available, required, services, max_depth):
    """services: id -> (inputs, outputs, qos). Every ordered sequence of distinct services."""
    best = None
    ids = sorted(services)
    for length in range(0, max_depth + 1):
        for seq in itertools.permutations(ids, length):
            have = set(available)
            ok = True
            for sid in seq:
                ins, outs, _ = services[sid]
                if not set(ins) <= have:
                    ok = False
                    break
                have |= set(outs)
            if not ok or not set(required) <= have:
                continue
            key = (length, -sum(services[s][2] for s in seq), seq)
            if best is None or key < best:
                best = key
        if best is not None:
            return list(best[2])
    return None


def brute_force_scores(keywords, concepts, is_a, provided_by, decay, max_hops):
    """Score every service by walking every isA chain from every keyword."""
    parents = {}
    for child, parent in is_a:
        parents.setdefault(child, []).append(parent)

    def min_hops(start, start_hops, service):
        found = math.inf

        def walk(node, hops):
            nonlocal found
            if hops > max_hops:
                return
            if service in provided_by.get(node, ()):
                found = min(found, hops)
            for p in parents.get(node, ()):
                walk(p, hops + 1)

        walk(start, start_hops)
        return found

    services = set()
    for ids in provided_by.values():
        services |= set(ids)
    words = sorted(set(keywords))
    out = {}
    for s in services:
        total = Fraction(0)
        for w in words:
            if w in concepts:
                h = min_hops(w, 0, s)
            elif " " in w and w.split(" ")[-1] in concepts:
                h = min_hops(w.split(" ")[-1], 1, s)
            else:
                h = math.inf
            if h != math.inf:
                total += Fraction(decay) ** h
        if words and total > 0:
            out[s] = total / len(words)
    return out


def pruned_concepts(concepts, freq, is_a):
    total = sum(freq.get(c, 0) for c in concepts)
    kept = {c for c in concepts if freq.get(c, 0) * len(concepts) >= total}
    changed = True
    while changed:
        changed = False
        for child, parent in is_a:
            if child in kept and parent not in kept:
                kept.add(parent)
                changed = True
    return kept


def tally_log(lines):
    out = {}
    for line in lines:
        date, sid, outcome, ms = line.split(",")
        entry = out.setdefault(sid, {"success": 0, "failure": 0, "ms": 0, "last": ""})
        entry[outcome] += 1
        entry["ms"] += int(ms)
        entry["last"] = max(entry["last"], date)
    return out


def dom_task_order(xml_text):
    """Task ids in topological order (document-order ties) by a plain DOM walk."""
    doc = xml.dom.minidom.parseString(xml_text)
    root = doc.documentElement
    order = [el.getAttribute("id") for el in root.childNodes
             if el.nodeType == el.ELEMENT_NODE and el.tagName != "sequenceFlow"]
    kinds = {el.getAttribute("id"): el.tagName for el in root.childNodes
             if el.nodeType == el.ELEMENT_NODE}
    edges = [(el.getAttribute("source"), el.getAttribute("target"))
             for el in root.getElementsByTagName("sequenceFlow")]
    done = []
    while len(done) < len(order):
        for ident in order:
            if ident not in done and all(s in done for s, t in edges if t == ident):
                done.append(ident)
                break
    return [i for i in done if kinds[i] == "task"]
