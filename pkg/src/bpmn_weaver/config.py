"""Flat ``key = value`` configuration shared by all pipeline stages."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError

ENV_VAR = "BPMN_WEAVER_CONFIG"

# file key -> dataclass field
KEYS = {
    "match.theta": "match_theta",
    "match.decay": "match_decay",
    "match.max_hops": "match_max_hops",
    "select.score_first": "select_score_first",
    "compose.max_depth": "compose_max_depth",
    "compose.use_isa": "compose_use_isa",
    "orchestrator.use_name": "use_name",
    "orchestrator.workers": "workers",
    "chunk_pattern": "chunk_pattern",
}


@dataclass(frozen=True)
class Config:
    match_theta: Fraction = Fraction(1, 2)
    match_decay: Fraction = Fraction(1, 2)
    match_max_hops: int = 2
    select_score_first: bool = False
    compose_max_depth: int = 4
    compose_use_isa: bool = False
    use_name: bool = True
    workers: int = 1
    chunk_pattern: str = "(ADJ|N)*N"

    def __post_init__(self) -> None:
        if not 0 <= self.match_theta <= 1:
            raise ConfigError("match.theta must lie in [0, 1]")
        if not 0 < self.match_decay <= 1:
            raise ConfigError("match.decay must lie in (0, 1]")
        if self.match_max_hops < 0:
            raise ConfigError("match.max_hops must be >= 0")
        if self.compose_max_depth < 1:
            raise ConfigError("compose.max_depth must be >= 1")
        if self.workers < 1:
            raise ConfigError("orchestrator.workers must be >= 1")

    def items(self) -> list[tuple[str, str]]:
        """Effective values as ``(key, text)`` pairs in a fixed order."""
        out = []
        for key, attr in KEYS.items():
            value = getattr(self, attr)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, Fraction):
                text = str(value.numerator) if value.denominator == 1 else str(float(value))
                if Fraction(text) != value:  # keep the echo exact, e.g. 1/3
                    text = str(value)
            else:
                text = str(value)
            out.append((key, text))
        return out

    def with_values(self, **changes) -> Config:
        return replace(self, **changes)


def _coerce(attr: str, raw: str):
    kind = {f.name: f.type for f in fields(Config)}[attr]
    try:
        if kind == "Fraction":
            return Fraction(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {attr}: {raw!r}") from exc
    return raw


def parse_config(text: str, base: Config | None = None) -> Config:
    values = {}
    for no, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {no}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {no}: unknown key {key!r}")
        values[KEYS[key]] = _coerce(KEYS[key], raw)
    return replace(base or Config(), **values)


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Read a config file; falls back to $BPMN_WEAVER_CONFIG, then defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
