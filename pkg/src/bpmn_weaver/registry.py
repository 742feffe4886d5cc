"""Service registry: descriptor files, QoS counters, and log ingestion."""

from __future__ import annotations

import datetime as dt
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import DuplicateServiceId, MalformedDescriptor, MalformedLogLine, UnknownServiceId

COMPONENT_TYPES = ("humanTask", "bpmnProcess", "callServiceTask")


@dataclass(frozen=True)
class QosRecord:
    available: int = 0          # successful executions
    calls: int = 0              # total calls
    response_sum_ms: int = 0

    def __post_init__(self) -> None:
        if min(self.available, self.calls, self.response_sum_ms) < 0:
            raise ValueError("QoS counters must be nonnegative")
        if self.available > self.calls:
            raise ValueError("successful executions exceed total calls")

    @property
    def failures(self) -> int:
        return self.calls - self.available

    @property
    def avg_response_ms(self) -> Fraction | None:
        if self.calls == 0:
            return None
        return Fraction(self.response_sum_ms, self.calls)

    def record_call(self, success: bool, response_ms: int) -> QosRecord:
        return QosRecord(self.available + int(success), self.calls + 1,
                         self.response_sum_ms + response_ms)


@dataclass(frozen=True)
class ServiceRecord:
    id: str
    publisher: str
    component_type: str
    url: str
    description: str
    operation_name: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    qos: QosRecord = QosRecord()
    last_use: dt.date | None = None


@dataclass(frozen=True)
class Registry:
    """An immutable registry snapshot. Updates return a new snapshot."""

    records: Mapping[str, ServiceRecord] = field(default_factory=dict)
    version: int = 0
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", MappingProxyType(dict(self.records)))

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, ident: object) -> bool:
        return ident in self.records

    def __getitem__(self, ident: str) -> ServiceRecord:
        try:
            return self.records[ident]
        except KeyError:
            raise UnknownServiceId(ident) from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Registry):
            return NotImplemented
        return self.version == other.version and dict(self.records) == dict(other.records)

    __hash__ = None

    @property
    def ids(self) -> list[str]:
        return sorted(self.records)

    def type_vocabulary(self) -> frozenset[str]:
        vocab: set[str] = set()
        for rec in self.records.values():
            vocab |= rec.inputs | rec.outputs
        return frozenset(vocab)


def get_snapshot(reg: Registry) -> Registry:
    # Registry values are already immutable; a snapshot is the value itself.
    return reg


# ---------------------------------------------------------------- descriptors


def parse_descriptor(text: str, index: int = 0) -> ServiceRecord:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedDescriptor(index, f"not well-formed: {exc}") from None
    if root.tag != "service":
        raise MalformedDescriptor(index, f"root element must be <service>, got <{root.tag}>")

    def need(el: ET.Element, attr: str) -> str:
        value = el.get(attr)
        if value is None:
            raise MalformedDescriptor(index, f"<{el.tag}> is missing {attr!r}")
        return value

    ident = need(root, "id")
    component = need(root, "componentType")
    if component not in COMPONENT_TYPES:
        raise MalformedDescriptor(index, f"componentType {component!r} not one of {COMPONENT_TYPES}")
    desc_el = root.find("description")
    op = root.find("operation")
    if desc_el is None or not (desc_el.text or "").strip():
        raise MalformedDescriptor(index, "description missing or empty")
    if op is None:
        raise MalformedDescriptor(index, "no <operation>")
    inputs = frozenset(need(el, "type") for el in op.findall("input"))
    outputs = frozenset(need(el, "type") for el in op.findall("output"))
    if not outputs:
        raise MalformedDescriptor(index, "operation declares no output")

    qos, last_use = QosRecord(), None
    qos_el = root.find("qos")
    if qos_el is not None:
        try:
            qos = QosRecord(int(qos_el.get("available", 0)), int(qos_el.get("calls", 0)),
                            int(qos_el.get("responseSumMs", 0)))
            if qos_el.get("lastUse"):
                last_use = dt.date.fromisoformat(qos_el.get("lastUse"))
        except ValueError as exc:
            raise MalformedDescriptor(index, f"bad qos element: {exc}") from None
    return ServiceRecord(
        id=ident,
        publisher=root.get("publisher", ""),
        component_type=component,
        url=root.get("url", ""),
        description=desc_el.text,
        operation_name=need(op, "name"),
        inputs=inputs,
        outputs=outputs,
        qos=qos,
        last_use=last_use,
    )


def _esc(value: str, attr: bool = True) -> str:
    value = value.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")
    if attr:
        value = value.replace('"', "&quot;").replace("\t", "&#9;").replace("\n", "&#10;")
    return value


def dump_descriptor(rec: ServiceRecord) -> str:
    lines = [
        f'<service id="{_esc(rec.id)}" publisher="{_esc(rec.publisher)}" '
        f'componentType="{rec.component_type}" url="{_esc(rec.url)}">',
        f"  <description>{_esc(rec.description, attr=False)}</description>",
        f'  <operation name="{_esc(rec.operation_name)}">',
    ]
    lines += [f'    <input type="{_esc(t)}"/>' for t in sorted(rec.inputs)]
    lines += [f'    <output type="{_esc(t)}"/>' for t in sorted(rec.outputs)]
    lines.append("  </operation>")
    last = f' lastUse="{rec.last_use.isoformat()}"' if rec.last_use else ""
    q = rec.qos
    lines.append(f'  <qos available="{q.available}" calls="{q.calls}" '
                 f'responseSumMs="{q.response_sum_ms}"{last}/>')
    lines.append("</service>")
    return "\n".join(lines) + "\n"


def load_registry(descriptor_texts: Iterable[str]) -> Registry:
    records: dict[str, ServiceRecord] = {}
    for index, text in enumerate(descriptor_texts):
        rec = parse_descriptor(text, index)
        if rec.id in records:
            raise DuplicateServiceId(rec.id)
        records[rec.id] = rec
    return Registry(records)


def registry_files(directory: str | Path) -> list[Path]:
    return sorted(Path(directory).glob("*.xml"))


def load_registry_dir(directory: str | Path) -> Registry:
    return load_registry(p.read_text(encoding="utf-8") for p in registry_files(directory))


def save_registry_dir(reg: Registry, directory: str | Path) -> None:
    """Rewrite descriptor files in place, keeping each record in its original file."""
    directory = Path(directory)
    by_id = {}
    for path in registry_files(directory):
        by_id[parse_descriptor(path.read_text(encoding="utf-8")).id] = path
    for ident, rec in reg.records.items():
        path = by_id.get(ident, directory / f"{ident}.xml")
        path.write_text(dump_descriptor(rec), encoding="utf-8")


# ---------------------------------------------------------------- QoS log


@dataclass(frozen=True)
class LogEntry:
    date: dt.date
    service_id: str
    success: bool
    response_ms: int


def parse_log_line(line: str, line_no: int) -> LogEntry:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) != 4:
        raise MalformedLogLine(line_no, "expected date,serviceId,outcome,responseTimeMs")
    date_text, ident, outcome, ms = parts
    try:
        date = dt.date.fromisoformat(date_text[:10])
        if len(date_text) > 10:
            dt.datetime.fromisoformat(date_text)
    except ValueError:
        raise MalformedLogLine(line_no, f"bad date {date_text!r}") from None
    if outcome not in ("success", "failure"):
        raise MalformedLogLine(line_no, f"bad outcome {outcome!r}")
    if not ms.isdigit():
        raise MalformedLogLine(line_no, f"bad response time {ms!r}")
    if not ident:
        raise MalformedLogLine(line_no, "empty service id")
    return LogEntry(date, ident, outcome == "success", int(ms))


def ingest_qos_log(reg: Registry, log_text: str) -> Registry:
    """Fold a QoS log into the counters; returns the next snapshot.

    Unknown service ids do not stop ingestion; they are listed in ``warnings``.
    """
    records = dict(reg.records)
    warnings = []
    for line_no, line in enumerate(log_text.split("\n"), 1):
        if not line.strip():
            continue
        entry = parse_log_line(line, line_no)
        rec = records.get(entry.service_id)
        if rec is None:
            warnings.append(f"line {line_no}: unknown service id {entry.service_id!r}")
            continue
        last = entry.date if rec.last_use is None else max(rec.last_use, entry.date)
        records[entry.service_id] = replace(
            rec, qos=rec.qos.record_call(entry.success, entry.response_ms), last_use=last)
    return Registry(records, reg.version + 1, tuple(warnings))
