"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations


class WeaverError(Exception):
    """Base class for all errors raised by bpmn_weaver."""


class MalformedXml(WeaverError):
    pass


class SchemaViolation(WeaverError):
    def __init__(self, message: str, ident: str | None = None) -> None:
        super().__init__(message)
        self.ident = ident


class GraphInvalid(WeaverError):
    """Raised by the parser when the process graph breaks an invariant.

    ``ident`` is the first offending node/edge id; ``diagnostics`` holds all of them.
    """

    def __init__(self, message: str, ident: str | None, diagnostics=()) -> None:
        super().__init__(message)
        self.ident = ident
        self.diagnostics = tuple(diagnostics)


class MalformedDescriptor(SchemaViolation):
    def __init__(self, index: int, reason: str) -> None:
        super().__init__(f"descriptor #{index}: {reason}")
        self.index = index
        self.reason = reason


class DuplicateServiceId(WeaverError):
    def __init__(self, ident: str) -> None:
        super().__init__(f"duplicate service id {ident!r}")
        self.ident = ident


class UnknownServiceId(WeaverError, KeyError):
    def __init__(self, ident: str) -> None:
        super().__init__(f"unknown service id {ident!r}")
        self.ident = ident

    def __str__(self) -> str:
        return self.args[0]


class MalformedLogLine(WeaverError):
    def __init__(self, line_no: int, reason: str = "") -> None:
        super().__init__(f"QoS log line {line_no}: {reason}".rstrip(": "))
        self.line_no = line_no


class LexiconMissing(WeaverError):
    pass


class EmptyRegistry(WeaverError):
    pass


class MalformedTriple(WeaverError):
    def __init__(self, line_no: int, reason: str = "") -> None:
        super().__init__(f"triple line {line_no}: {reason}".rstrip(": "))
        self.line_no = line_no


class OntologyRegistryMismatch(WeaverError):
    def __init__(self, missing) -> None:
        self.missing = tuple(sorted(missing))
        super().__init__("ontology references services absent from the registry: " + ", ".join(self.missing))


class InvalidDesign(WeaverError):
    def __init__(self, diagnostics) -> None:
        self.diagnostics = tuple(diagnostics)
        super().__init__("; ".join(f"{d.code}({d.ident})" for d in self.diagnostics))


class ConfigError(WeaverError):
    pass
