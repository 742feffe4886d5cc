"""Compile design-stage process documents into implemented ones by binding tasks to services."""

from .bpmn_model import (Binding, Diagnostic, FlowEdge, Node, ProcessGraph, emit_implemented, format_score,
                         parse_design, validate)
from .config import Config, load_config, parse_config
from .keyword_extraction import KeywordSet, analyse, extract_keywords
from .ontology import (CompositionPlan, ConceptGraph, ProcessMemo, build_service_ontology, load_triples,
                       memo_lookup, memo_record, prune_baseline, save_triples)
from .orchestrator import Instrumentation, ResolutionReport, implement_process
from .registry import (QosRecord, Registry, ServiceRecord, get_snapshot, ingest_qos_log, load_registry,
                       load_registry_dir, save_registry_dir)
from .semantic_matching import Candidate, explain_match, match_task
from .service_composition import CompositionGoal, SearchStats, compose, replay
from .service_selection import qos_value, select_best

__version__ = "0.1.0"
