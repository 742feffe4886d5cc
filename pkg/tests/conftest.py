from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bpmn_weaver.bpmn_model import parse_design  # noqa: E402
from bpmn_weaver.ontology import build_service_ontology, prune_baseline  # noqa: E402
from bpmn_weaver.registry import load_registry_dir  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def order_xml() -> str:
    return (FIXTURES / "order_process.bpmn.xml").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def order_design(order_xml):
    return parse_design(order_xml)


@pytest.fixture(scope="session")
def fixture_registry():
    return load_registry_dir(FIXTURES / "registry")


@pytest.fixture(scope="session")
def fixture_ontology(fixture_registry):
    return prune_baseline(build_service_ontology(fixture_registry))


_acceptance: list[tuple[str, str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        if report.when == "call" or report.when == "setup":
            name = report.nodeid.split("::")[-1]
            _acceptance.append((name, report.outcome.upper(), f"{report.duration:.2f}s"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        mark = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name} ({duration})")
