"""QoS scoring and best-candidate selection."""

from __future__ import annotations

from typing import Sequence

from .registry import QosRecord, Registry


def qos_value(q: QosRecord) -> int:
    """Successful executions minus total calls, i.e. minus the failure count."""
    return q.available - q.calls


def selection_key(service_id: str, reg: Registry) -> tuple:
    """Sort key: highest QoS, then lowest mean response time, then id.

    A service that was never called has no mean response time and loses
    every response-time tie.
    """
    q = reg[service_id].qos
    avg = q.avg_response_ms
    return (-qos_value(q), (1, 0) if avg is None else (0, avg), service_id)


def select_best(cands: Sequence, reg: Registry, score_first: bool = False) -> str | None:
    """Pick one service out of the matched candidates.

    ``cands`` holds ``Candidate`` objects or bare service ids. With
    ``score_first`` only the top-scoring candidates compete on QoS.
    """
    if not cands:
        return None
    if score_first and hasattr(cands[0], "score"):
        top = max(c.score for c in cands)
        cands = [c for c in cands if c.score == top]
    ids = [getattr(c, "service_id", c) for c in cands]
    keys = [selection_key(i, reg) for i in ids]  # raises UnknownServiceId
    if len(ids) == 1:
        return ids[0]
    return min(keys)[2]
