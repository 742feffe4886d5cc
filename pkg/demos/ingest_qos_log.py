"""
Folding an execution log into the registry
==========================================

Each log line is one call: date, service, outcome, response time. Ingest
returns a new registry version and leaves the old snapshot untouched.
"""

from pathlib import Path

from bpmn_weaver import get_snapshot, ingest_qos_log, load_registry_dir, qos_value

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
reg = load_registry_dir(FIXTURES / "registry")
before = get_snapshot(reg)

after = ingest_qos_log(reg, (FIXTURES / "qos.log").read_text(encoding="utf-8"))
for sid in ("svc-stock-check", "svc-stock-legacy", "svc-pickup"):
    old, new = before[sid].qos, after[sid].qos
    print(f"{sid:<18} calls {old.calls:>2} -> {new.calls:>2}  qos {qos_value(old):>2} -> {qos_value(new):>2}"
          f"  avg_ms {float(new.avg_response_ms):.1f}")

print("versions:", before.version, "->", after.version)
print("warnings:", list(after.warnings))
