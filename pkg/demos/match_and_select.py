"""
Matching a task and picking by QoS
==================================

Candidates are scored against the concept graph. Exact concepts count 1,
a concept reached over isA edges counts less per hop. The winner among the
candidates is the one with the fewest failed calls, then the fastest.
"""

from pathlib import Path

from bpmn_weaver import (build_service_ontology, explain_match, extract_keywords, format_score,
                         load_registry_dir, match_task, prune_baseline, qos_value, select_best)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
reg = load_registry_dir(FIXTURES / "registry")
graph = prune_baseline(build_service_ontology(reg))

k = extract_keywords("Send the invoice to the customer by email. Send invoice")
cands = match_task(k, graph, reg)
for c in cands:
    q = reg[c.service_id].qos
    avg = "never called" if q.avg_response_ms is None else f"{float(q.avg_response_ms):.0f}"
    print(f"{c.service_id:<20} score={format_score(c.score)} qos={qos_value(q)} avg_ms={avg}")

best = select_best(cands, reg)
print("selected:", best)

# where the winner's score comes from, keyword by keyword
for t in explain_match(k, graph, best, reg):
    print(f"  {t.keyword!r:<24} via {' -> '.join(t.path) or '-'}  +{format_score(t.contribution)}")
