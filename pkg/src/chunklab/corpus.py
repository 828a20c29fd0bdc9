"""Data model for POS-tagged sentences and base-NP chunk labelings.

Chunks are encoded internally with the IOB1 tag scheme: ``I`` marks a token
inside a chunk, ``O`` a token outside any chunk, and ``B`` the first token of
a chunk that starts immediately after another chunk.  A sentence-initial
``B``, or a ``B`` after ``O``, is invalid and is normalized to ``I`` on
ingest.

Three interchangeable representations are supported, with lossless
conversion between them:

* IOB1 tag sequences (``Labeling``),
* sets of half-open token spans (``ChunkSpan``),
* bracketed text, one sentence per line: ``( The_DT man_NN ) ran_VBD ._.``
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

__all__ = [
    "Token",
    "Sentence",
    "Labeling",
    "ChunkSpan",
    "CorpusError",
    "parse_conll",
    "emit_conll",
    "iob_to_spans",
    "spans_to_iob",
    "bracket_render",
    "bracket_parse",
]

log = logging.getLogger(__name__)

CHUNK_TAGS = ("I", "O", "B")


class CorpusError(ValueError):
    """Malformed corpus input (bad column file, invalid tag sequence, ...)."""


@dataclass(frozen=True)
class Token:
    """One word with its Penn-Treebank POS tag."""

    word: str
    pos: str

    def __post_init__(self):
        if not self.word or any(c.isspace() for c in self.word):
            raise CorpusError(f"bad token word: {self.word!r}")
        if not self.pos:
            raise CorpusError("empty POS tag")


@dataclass(frozen=True)
class Sentence:
    """An ordered, immutable sequence of tokens with a stable id."""

    id: int
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError(f"sentence {self.id} has no tokens")
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.word for t in self.tokens)

    @property
    def pos_tags(self) -> tuple[str, ...]:
        return tuple(t.pos for t in self.tokens)


@dataclass(frozen=True, order=True)
class ChunkSpan:
    """Half-open token interval [start, end) covering one base NP."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise CorpusError(f"bad span [{self.start}, {self.end})")


@dataclass(frozen=True)
class Labeling:
    """A validated IOB1 chunk-tag sequence aligned with one sentence."""

    tags: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tags", tuple(self.tags))
        validate_iob1(self.tags)

    def __len__(self) -> int:
        return len(self.tags)

    def spans(self) -> frozenset[ChunkSpan]:
        return iob_to_spans(self.tags)

    @classmethod
    def from_spans(cls, spans, n: int) -> "Labeling":
        return cls(spans_to_iob(spans, n))


def validate_iob1(tags) -> None:
    """Raise CorpusError unless ``tags`` is a valid IOB1 sequence."""
    prev = "O"
    for i, t in enumerate(tags):
        if t not in CHUNK_TAGS:
            raise CorpusError(f"unknown chunk tag {t!r} at position {i}")
        if t == "B" and prev not in ("I", "B"):
            raise CorpusError(f"B not preceded by a chunk at position {i}")
        prev = t


def normalize_iob1(tags) -> tuple[str, ...]:
    """Repair an IOB1 sequence in place of rejecting it.

    A ``B`` that does not immediately follow a chunk cannot mark an adjacent
    chunk start, so it is downgraded to ``I``.  Downstream learners only ever
    see valid sequences.
    """
    out = []
    prev = "O"
    for i, t in enumerate(tags):
        if t not in CHUNK_TAGS:
            raise CorpusError(f"unknown chunk tag {t!r} at position {i}")
        if t == "B" and prev not in ("I", "B"):
            log.warning("normalizing invalid B to I at position %d", i)
            t = "I"
        out.append(t)
        prev = t
    return tuple(out)


# ---------------------------------------------------------------------------
# tag sequence <-> span set

def iob_to_spans(tags) -> frozenset[ChunkSpan]:
    """Convert a valid IOB1 sequence to its set of chunk spans."""
    validate_iob1(tags)
    spans = []
    start = None
    for i, t in enumerate(tags):
        if t == "O":
            if start is not None:
                spans.append(ChunkSpan(start, i))
                start = None
        elif t == "B":
            spans.append(ChunkSpan(start, i))
            start = i
        elif start is None:  # I opening a chunk
            start = i
    if start is not None:
        spans.append(ChunkSpan(start, len(tags)))
    return frozenset(spans)


def spans_to_iob(spans, n: int) -> tuple[str, ...]:
    """Convert disjoint, non-nested spans to the IOB1 sequence of length n."""
    ordered = sorted(spans)
    tags = ["O"] * n
    prev_end = None
    for s in ordered:
        if s.end > n:
            raise CorpusError(f"span {s} exceeds sentence length {n}")
        if prev_end is not None and s.start < prev_end:
            raise CorpusError(f"overlapping spans at {s}")
        first = "B" if s.start == prev_end else "I"
        tags[s.start] = first
        for i in range(s.start + 1, s.end):
            tags[i] = "I"
        prev_end = s.end
    return tuple(tags)


# ---------------------------------------------------------------------------
# CoNLL-style column files

def parse_conll(text: str) -> list[tuple[Sentence, Labeling]]:
    """Parse "WORD POS TAG" lines, blank line between sentences.

    Tag sequences are normalized to valid IOB1 (a ``B`` with no preceding
    chunk becomes ``I``, with a warning).  Raises CorpusError naming the
    offending line for malformed rows.
    """
    pairs: list[tuple[Sentence, Labeling]] = []
    words: list[Token] = []
    tags: list[str] = []

    def flush():
        if words:
            sent = Sentence(len(pairs), tuple(words))
            pairs.append((sent, Labeling(normalize_iob1(tags))))
            words.clear()
            tags.clear()

    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            flush()
            continue
        fields = line.split()
        if len(fields) != 3:
            raise CorpusError(f"line {lineno}: expected 3 columns, got {len(fields)}")
        word, pos, tag = fields
        if tag not in CHUNK_TAGS:
            raise CorpusError(f"line {lineno}: unknown chunk tag {tag!r}")
        if "_" in pos:
            raise CorpusError(f"line {lineno}: POS tag {pos!r} contains an underscore")
        words.append(Token(word, pos))
        tags.append(tag)
    flush()
    return pairs


def emit_conll(pairs) -> str:
    """Render sentence/labeling pairs back to the column format.

    Round-trips bit-exactly through :func:`parse_conll`.
    """
    blocks = []
    for sent, lab in pairs:
        if len(sent) != len(lab):
            raise CorpusError(f"sentence {sent.id}: labeling length mismatch")
        lines = [f"{t.word} {t.pos} {tag}" for t, tag in zip(sent.tokens, lab.tags)]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


# ---------------------------------------------------------------------------
# bracketed text

def bracket_render(sentence: Sentence, spans) -> str:
    """Render one sentence with its chunks as bracketed text.

    Tokens appear as ``word_POS``; chunk boundaries are standalone ``(`` and
    ``)`` tokens.  The word/POS separator is the final underscore of the
    token, so words containing underscores survive a round-trip but POS tags
    containing underscores are rejected.
    """
    ordered = sorted(set(spans))
    prev_end = 0
    for s in ordered:
        if s.start < prev_end or s.end > len(sentence):
            raise CorpusError(f"span {s} overlaps or is out of range")
        prev_end = s.end
    starts = {s.start for s in ordered}
    ends = {s.end for s in ordered}
    out = []
    for i, tok in enumerate(sentence.tokens):
        if "_" in tok.pos:
            raise CorpusError(f"POS tag {tok.pos!r} contains an underscore")
        if i in ends:
            out.append(")")
        if i in starts:
            out.append("(")
        out.append(f"{tok.word}_{tok.pos}")
    if len(sentence) in ends:
        out.append(")")
    return " ".join(out)


def bracket_parse(text: str, sentence_id: int = 0) -> tuple[Sentence, frozenset[ChunkSpan]]:
    """Parse bracketed text back to a sentence and its span set.

    Exact inverse of :func:`bracket_render`.  Unbalanced or nested
    parentheses are errors.
    """
    tokens: list[Token] = []
    spans: list[ChunkSpan] = []
    open_at: int | None = None
    for chunk in text.split():
        if chunk == "(":
            if open_at is not None:
                raise CorpusError("nested '(' in bracketed text")
            open_at = len(tokens)
        elif chunk == ")":
            if open_at is None:
                raise CorpusError("unbalanced ')' in bracketed text")
            if open_at == len(tokens):
                raise CorpusError("empty chunk '( )' in bracketed text")
            spans.append(ChunkSpan(open_at, len(tokens)))
            open_at = None
        else:
            word, sep, pos = chunk.rpartition("_")
            if not sep or not word or not pos:
                raise CorpusError(f"cannot split token {chunk!r} into word_POS")
            tokens.append(Token(word, pos))
    if open_at is not None:
        raise CorpusError("unbalanced '(' in bracketed text")
    if not tokens:
        raise CorpusError("empty bracketed sentence")
    return Sentence(sentence_id, tuple(tokens)), frozenset(spans)
