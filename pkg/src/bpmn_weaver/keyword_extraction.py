"""Rule-based keyword extraction: sentences -> tokens -> tags -> verbs and noun phrases.

The tagger is lexicon driven. Lookup order for each token:

1. closed-class words (DET, PREP, PRON, CONJ) from the lexicon,
2. open-class lexicon entries, directly or through a regular inflection of a
   known base form (``invoices`` -> ``invoice``, ``approved`` -> ``approve``),
3. suffix rules (``-tion`` -> N, ``-ize`` -> V, ``-ous`` -> ADJ, digits -> NUM),
4. unknown words: V at the start of a sentence, N elsewhere.

A word listed with several tags uses its first tag unless the neighbourhood
picks another listed reading (see ``_disambiguate``).
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import LexiconMissing

TAGS = ("N", "V", "ADJ", "DET", "PREP", "PRON", "CONJ", "NUM", "OTHER")
CLOSED_TAGS = frozenset({"DET", "PREP", "PRON", "CONJ"})
STOP_VERBS = frozenset(
    "be am is are was were been being have has had having do does did done doing".split()
)
DEFAULT_CHUNK_PATTERN = "(ADJ|N)*N"

_SUFFIX_RULES = (
    (("tion", "ment", "ness", "ity"), "N"),
    (("ize", "ify", "ate"), "V"),
    (("ous", "ful", "able"), "ADJ"),
)
_STEM_SUFFIXES = ("ing", "ed", "es", "s", "ly")
_SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")

_WORD_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*")
_NUM_RE = re.compile(r"\d+")
# . ? ! end a sentence only when followed by whitespace or end of text
_BOUNDARY_RE = re.compile(r"[.?!]+(?=\s|$)|\n")
ABBREVIATIONS = frozenset(
    "mr mrs ms dr prof sr jr st no vs etc inc ltd co dept approx".split()
)


@dataclass(frozen=True)
class Token:
    surface: str
    offset: int
    normalized: str = ""
    tag: str | None = None

    def __post_init__(self) -> None:
        if not self.normalized:
            object.__setattr__(self, "normalized", normalize(self.surface))


@dataclass(frozen=True)
class Phrase:
    tokens: tuple[Token, ...]

    @property
    def text(self) -> str:
        return " ".join(t.normalized for t in self.tokens)

    @property
    def head(self) -> str:
        return self.tokens[-1].normalized


@dataclass(frozen=True)
class KeywordSet:
    verbs: frozenset[str] = frozenset()
    noun_phrases: frozenset[str] = frozenset()
    head_nouns: frozenset[str] = frozenset()

    @property
    def keywords(self) -> frozenset[str]:
        return self.verbs | self.noun_phrases

    def canonical_key(self) -> str:
        return "|".join(sorted(self.keywords))

    def __bool__(self) -> bool:
        return bool(self.verbs or self.noun_phrases)


# ---------------------------------------------------------------- normalization


def _strip_once(word: str) -> str:
    for suffix in _STEM_SUFFIXES:
        if not word.endswith(suffix) or len(word) - len(suffix) < 3:
            continue
        if suffix == "es" and not word[:-2].endswith(_SIBILANT_ENDINGS):
            continue
        if suffix == "s" and word.endswith("ss"):
            continue
        return word[: -len(suffix)]
    return word


def normalize(word: str) -> str:
    """Lowercase and strip inflectional suffixes until none applies."""
    word = word.lower()
    while True:
        stripped = _strip_once(word)
        if stripped == word:
            return word
        word = stripped


# ---------------------------------------------------------------- lexicon


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, tuple[str, ...]] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> Lexicon:
        entries: dict[str, list[str]] = {}
        for no, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                word, tag = line.split("\t")
            except ValueError:
                raise LexiconMissing(f"lexicon line {no}: expected 'word<TAB>TAG'") from None
            tag = tag.strip()
            if tag not in TAGS:
                raise LexiconMissing(f"lexicon line {no}: unknown tag {tag!r}")
            tags = entries.setdefault(word.strip().lower(), [])
            if tag not in tags:
                tags.append(tag)
        return cls({w: tuple(t) for w, t in entries.items()})

    def readings(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word, ())

    def closed(self, word: str) -> str | None:
        tags = self.entries.get(word, ())
        return tags[0] if tags and tags[0] in CLOSED_TAGS else None

    def inflected(self, word: str) -> tuple[str, ...]:
        """Readings of ``word`` obtained through a known base form."""
        for base, kind in _base_forms(word):
            tags = tuple(t for t in self.entries.get(base, ()) if t in ("N", "V", "ADJ"))
            if not tags:
                continue
            if kind == "plural":
                return tuple(t for t in tags if t in ("N", "V")) or tags
            if kind in ("past", "gerund"):
                return ("V",)
            if kind == "adverb" and "ADJ" in tags:
                return ("OTHER",)
        return ()


def _base_forms(word: str):
    if word.endswith("ies") and len(word) > 4:
        yield word[:-3] + "y", "plural"
    if word.endswith("es") and len(word) > 3:
        yield word[:-2], "plural"
    if word.endswith("s") and not word.endswith("ss") and len(word) > 3:
        yield word[:-1], "plural"
    for suffix, kind in (("ed", "past"), ("ing", "gerund")):
        if word.endswith(suffix) and len(word) - len(suffix) >= 2:
            stem = word[: -len(suffix)]
            yield stem, kind
            yield stem + "e", kind
            if len(stem) > 2 and stem[-1] == stem[-2]:
                yield stem[:-1], kind
            if suffix == "ed" and stem.endswith("i"):
                yield stem[:-1] + "y", kind
    if word.endswith("ly") and len(word) > 4:
        yield word[:-2], "adverb"
        if word.endswith("ily"):
            yield word[:-3] + "y", "adverb"


DEFAULT_LEXICON_PATH = "lexicon/en.tsv"


@lru_cache(maxsize=8)
def _load_lexicon_cached(path: str | None) -> Lexicon:
    try:
        if path is None:
            text = resources.files(__package__).joinpath(DEFAULT_LEXICON_PATH).read_text("utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
    except (OSError, FileNotFoundError) as exc:
        raise LexiconMissing(f"cannot load lexicon: {exc}") from exc
    return Lexicon.from_text(text)


def load_lexicon(path: str | Path | None = None) -> Lexicon:
    return _load_lexicon_cached(None if path is None else str(path))


# ---------------------------------------------------------------- stages


def split_sentences(text: str) -> list[str]:
    sentences = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        if m.group() == "\n":
            end = m.start()
        else:
            if m.group() == "." and _is_abbreviation(text, m.start()):
                continue
            end = m.end()
        piece = text[start:end].strip()
        if piece:
            sentences.append(piece)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _is_abbreviation(text: str, dot: int) -> bool:
    i = dot
    while i > 0 and text[i - 1].isalpha():
        i -= 1
    word = text[i:dot]
    if len(word) == 1:
        return True
    return word.lower() in ABBREVIATIONS


def tokenize(sentence: str, base: int = 0) -> list[Token]:
    return [Token(m.group(), base + m.start()) for m in _WORD_RE.finditer(sentence)]


def _suffix_tag(word: str) -> str | None:
    if _NUM_RE.fullmatch(word):
        return "NUM"
    for suffixes, tag in _SUFFIX_RULES:
        for suffix in suffixes:
            if word.endswith(suffix) and len(word) > len(suffix):
                return tag
    return None


def _readings(word: str, first: bool, lexicon: Lexicon) -> tuple[str, ...]:
    tag = lexicon.closed(word)
    if tag:
        return (tag,)
    tags = lexicon.readings(word) or lexicon.inflected(word)
    if tags:
        return tags
    tag = _suffix_tag(word)
    if tag:
        return (tag,)
    return ("V",) if first else ("N",)


def _disambiguate(readings: tuple[str, ...], first: bool, prev: str | None) -> str:
    if len(readings) == 1:
        return readings[0]
    if first and "V" in readings:
        return "V"
    if prev in ("DET", "ADJ", "PREP") and readings[0] == "V":
        for tag in ("N", "ADJ"):
            if tag in readings:
                return tag
    return readings[0]


def pos_tag(tokens: list[Token], lexicon: Lexicon | None = None) -> list[Token]:
    lexicon = lexicon or load_lexicon()
    tagged: list[Token] = []
    prev = None
    for tok in tokens:
        # leading adverbs ("then", "also") do not end the imperative slot
        first = all(t.tag == "OTHER" for t in tagged)
        readings = _readings(tok.surface.lower(), first, lexicon)
        tag = _disambiguate(readings, first, prev)
        tagged.append(replace(tok, tag=tag))
        prev = tag
    return tagged


_TAG_CODES = {"N": "n", "V": "v", "ADJ": "a", "DET": "d", "PREP": "p",
              "PRON": "r", "CONJ": "c", "NUM": "u", "OTHER": "o"}


@lru_cache(maxsize=16)
def compile_chunk_pattern(pattern: str) -> re.Pattern:
    """Translate a tag pattern such as ``(ADJ|N)*N`` into a regex over tag codes."""
    def code(m: re.Match) -> str:
        if m.group() not in _TAG_CODES:
            raise ValueError(f"unknown tag {m.group()!r} in chunk pattern")
        return _TAG_CODES[m.group()]
    body = re.sub(r"[A-Z]+", code, pattern.replace(" ", ""))
    return re.compile(body)


def chunk_noun_phrases(tagged: list[Token], pattern: str = DEFAULT_CHUNK_PATTERN) -> list[Phrase]:
    """Maximal, non-overlapping token spans whose tags match ``pattern``.

    The head of each phrase is its last N token; a match without any N is discarded.
    """
    codes = "".join(_TAG_CODES[t.tag] for t in tagged)
    phrases = []
    for m in compile_chunk_pattern(pattern).finditer(codes):
        span = list(tagged[m.start():m.end()])
        while span and span[-1].tag != "N":
            span.pop()
        if span:
            phrases.append(Phrase(tuple(span)))
    return phrases


def analyse(text: str, lexicon: Lexicon | None = None,
            pattern: str = DEFAULT_CHUNK_PATTERN) -> tuple[list[Token], list[Phrase]]:
    """Run every stage and return all tagged tokens and all phrases, in text order."""
    lexicon = lexicon or load_lexicon()
    tokens: list[Token] = []
    phrases: list[Phrase] = []
    pos = 0
    for sentence in split_sentences(text):
        base = text.index(sentence, pos)
        pos = base + len(sentence)
        tagged = pos_tag(tokenize(sentence, base), lexicon)
        tokens.extend(tagged)
        phrases.extend(chunk_noun_phrases(tagged, pattern))
    return tokens, phrases


def _verbs(tokens: list[Token]) -> list[str]:
    return [t.normalized for t in tokens
            if t.tag == "V" and t.surface.lower() not in STOP_VERBS
            and t.normalized not in STOP_VERBS]


def keyword_counts(text: str, lexicon: Lexicon | None = None,
                   pattern: str = DEFAULT_CHUNK_PATTERN) -> tuple[Counter, Counter]:
    """Occurrence counts of verbs and noun phrases (used for concept frequencies)."""
    tokens, phrases = analyse(text, lexicon, pattern)
    return Counter(_verbs(tokens)), Counter(p.text for p in phrases)


def extract_keywords(text: str, lexicon: Lexicon | None = None,
                     pattern: str = DEFAULT_CHUNK_PATTERN) -> KeywordSet:
    tokens, phrases = analyse(text, lexicon, pattern)
    return KeywordSet(
        verbs=frozenset(_verbs(tokens)),
        noun_phrases=frozenset(p.text for p in phrases),
        head_nouns=frozenset(p.head for p in phrases),
    )
