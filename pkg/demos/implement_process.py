"""
From design document to implemented document
============================================

The order process has five tasks. Four bind to a single service; the pickup
task has no direct match and gets a two-service chain fed by the order that
the first task produces.
"""

from pathlib import Path

from bpmn_weaver import (Config, build_service_ontology, emit_implemented, implement_process,
                         load_registry_dir, parse_design, prune_baseline)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
design = parse_design((FIXTURES / "order_process.bpmn.xml").read_text(encoding="utf-8"))
reg = load_registry_dir(FIXTURES / "registry")
graph = prune_baseline(build_service_ontology(reg))

bound, report = implement_process(design, reg, graph)
for tid, outcome in report.per_task:
    print(tid, outcome.as_dict())
print(report.counters)

# tasks of one rank may run on threads; the output does not change
threaded, _ = implement_process(design, reg, graph, cfg=Config(workers=4))
assert emit_implemented(threaded) == emit_implemented(bound)

print(emit_implemented(bound))
