"""``bpmn-weaver`` command line.

Exit codes: 0 all tasks bound, 2 some tasks unresolved (output still written),
1 usage or hard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bpmn_model import emit_implemented, format_score, parse_design
from .config import load_config
from .errors import WeaverError
from .keyword_extraction import extract_keywords, load_lexicon
from .ontology import ConceptGraph, ProcessMemo, build_service_ontology, load_triples, prune_baseline, save_triples
from .orchestrator import check_ontology, implement_process, task_text
from .registry import ingest_qos_log, load_registry_dir, save_registry_dir
from .semantic_matching import explain_match, match_task


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bpmn-weaver", description="Resolve design-stage process tasks to registry services.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build-ontology", help="learn the concept graph from a registry")
    b.add_argument("-r", "--registry", required=True)
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--no-prune", action="store_true")
    b.add_argument("--config")

    i = sub.add_parser("implement", help="bind every task of a design document")
    i.add_argument("-p", "--process", required=True)
    i.add_argument("-r", "--registry", required=True)
    i.add_argument("-g", "--ontology", help="triple file; built from the registry when omitted")
    i.add_argument("-o", "--output", required=True)
    i.add_argument("--report")
    i.add_argument("--config")
    i.add_argument("--memo", help="process memo file, read if present and rewritten")

    g = sub.add_parser("ingest-log", help="fold a QoS log into the registry descriptors")
    g.add_argument("-r", "--registry", required=True)
    g.add_argument("-l", "--log", required=True)

    e = sub.add_parser("explain", help="show how services score against one task")
    e.add_argument("-p", "--process", required=True)
    e.add_argument("-r", "--registry", required=True)
    e.add_argument("-g", "--ontology")
    e.add_argument("--task", required=True)
    e.add_argument("--service", help="trace this service even when it is below threshold")
    e.add_argument("--config")
    return p


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _ontology(args, reg, cfg) -> ConceptGraph:
    if args.ontology:
        graph = load_triples(_read(args.ontology))
        check_ontology(graph, reg)
        return graph
    if not len(reg):
        return ConceptGraph()
    return prune_baseline(build_service_ontology(reg, pattern=cfg.chunk_pattern))


def _build(args) -> int:
    cfg = load_config(args.config)
    graph = build_service_ontology(load_registry_dir(args.registry), pattern=cfg.chunk_pattern)
    if not args.no_prune:
        graph = prune_baseline(graph)
    Path(args.output).write_text(save_triples(graph), encoding="utf-8")
    print(f"{len(graph.concepts)} concepts, {len(graph.is_a)} isA edges -> {args.output}")
    return 0


def _implement(args) -> int:
    cfg = load_config(args.config)
    design = parse_design(_read(args.process))
    reg = load_registry_dir(args.registry)
    graph = _ontology(args, reg, cfg)
    memo_path = Path(args.memo) if args.memo else None
    memo = ProcessMemo.loads(_read(memo_path)) if memo_path and memo_path.exists() else ProcessMemo()
    bound, report = implement_process(design, reg, graph, memo, cfg, lexicon=load_lexicon())
    Path(args.output).write_text(emit_implemented(bound), encoding="utf-8")
    if args.report:
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    if memo_path:
        memo_path.write_text(memo.dumps(), encoding="utf-8")
    for tid, outcome in report.per_task:
        if outcome.kind == "unresolved":
            print(f"task {tid}: no service found ({outcome.reason})", file=sys.stderr)
    return 2 if report.counters["failed"] else 0


def _ingest(args) -> int:
    reg = load_registry_dir(args.registry)
    updated = ingest_qos_log(reg, _read(args.log))
    for warning in updated.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    save_registry_dir(updated, args.registry)
    print(f"ingested {args.log} into {len(updated)} services")
    return 0


def _explain(args) -> int:
    cfg = load_config(args.config)
    design = parse_design(_read(args.process))
    reg = load_registry_dir(args.registry)
    graph = _ontology(args, reg, cfg)
    try:
        node = design.node(args.task)
    except KeyError:
        raise WeaverError(f"no node {args.task!r} in {args.process}") from None
    if not node.is_task:
        raise WeaverError(f"{args.task!r} is not a task")
    k = extract_keywords(task_text(node, cfg), load_lexicon(), cfg.chunk_pattern)
    print(f"task {node.id}: verbs={sorted(k.verbs)} noun_phrases={sorted(k.noun_phrases)}")
    if args.service:
        services = [args.service]
    else:
        services = [c.service_id for c in match_task(k, graph, reg, cfg)]
        if not services:
            print("no candidate reaches the match threshold")
    n = len(k.keywords)
    for sid in services:
        traces = explain_match(k, graph, sid, reg, cfg)
        total = sum(t.contribution for t in traces)
        print(f"service {sid}: score {format_score(total / n if n else 0)}")
        for t in traces:
            path = " -> ".join(t.path) if t.path else "-"
            hops = "-" if t.hops is None else t.hops
            print(f"  {t.keyword!r}: concept={t.concept!r} hops={hops} path={path} "
                  f"contribution={format_score(t.contribution)}")
    return 0


COMMANDS = {"build-ontology": _build, "implement": _implement,
            "ingest-log": _ingest, "explain": _explain}


def run_cli(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (WeaverError, OSError) as exc:
        print(f"bpmn-weaver: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
