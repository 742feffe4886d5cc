"""
Chaining services by their types
================================

When nothing matches a task, services are chained so that each one's inputs
are already available. The shortest chain wins, then the best total QoS.
A second request with the same keywords is answered from the memo.
"""

from pathlib import Path

from bpmn_weaver import (CompositionGoal, KeywordSet, ProcessMemo, SearchStats, compose,
                         load_registry_dir, replay)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
reg = load_registry_dir(FIXTURES / "registry")

goal = CompositionGoal(available=frozenset({"webOrder"}), required=frozenset({"pickupConfirmation"}))
k = KeywordSet(frozenset({"arrange"}), frozenset({"courier pickup", "parcel"}))

memo, stats = ProcessMemo(), SearchStats()
plan = compose(goal, reg, memo, k, stats=stats)
print("plan:", " -> ".join(plan.services), f"(total QoS {plan.total_qos})")
print("replays:", replay(plan, goal, reg))

again = compose(goal, reg, memo, k, stats=stats)
print("same plan again:", again == plan, "| searches:", stats.searches, "memo hits:", stats.memo_hits)
print(memo.dumps(), end="")
