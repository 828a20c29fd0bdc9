"""Bracketing-rule language for human rule writers.

A rule is a whitespace-separated sequence of bracket symbols and token
patterns, one rule per line::

    { _DT ADJ* NOUN+ }
    { about_ [ _$ NUM+ ] }

``{`` and ``}`` mark where chunk brackets go after the rule applies; ``[``
and ``]`` must line up with an existing chunk's start/end for the rule to
match (``[?`` and ``]?`` make the boundary optional).  A token pattern is
``word_tag``, split at its first top-level underscore, each side a regular
expression fragment anchored to the whole word or tag; an empty side
matches anything.  A tag fragment starting with ``!`` inverts the test.
``::?``, ``::*`` and ``::+`` repeat a pattern across consecutive tokens.
Uppercase names are macro references and may take bare ``?``, ``*``, ``+``
suffixes.  Lines beginning with ``#`` are comments; a trailing backslash
continues a rule on the next line.

When a rule matches a region, every existing chunk inside the region is
dropped and the chunks given by ``{ ... }`` pairs are installed.  Matching
is greedy with backtracking, leftmost match first, one pass per rule per
sentence, and never leaves nested or crossing chunks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .corpus import ChunkSpan, Labeling, Sentence
from .metrics import EvalReport, ZERO, pr_counts, report_from_counts

__all__ = [
    "DslError",
    "Diagnostic",
    "TokenPattern",
    "Bracket",
    "DslRule",
    "MacroTable",
    "RuleListProgram",
    "ParseResult",
    "DEFAULT_MACROS",
    "parse_macro_file",
    "parse_rule_file",
    "parse_rule_line",
    "serialize_program",
    "apply_rule",
    "apply_program",
    "evaluate_program",
    "ProgramReport",
]


class DslError(ValueError):
    """Unparseable rule or macro text."""


@dataclass(frozen=True)
class Diagnostic:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


# ---------------------------------------------------------------------------
# regular-expression fragments (portable subset)

_COMPILED: dict[str, re.Pattern] = {}


def _compile_fragment(frag: str) -> re.Pattern:
    """Compile a fragment of the portable subset: literals, (|) groups,
    character classes, ? * +, and the escapes \\w \\S \\$.  Other punctuation
    is taken literally; constructs outside the subset are errors."""
    cached = _COMPILED.get(frag)
    if cached is not None:
        return cached
    out = []
    i = 0
    depth = 0
    while i < len(frag):
        c = frag[i]
        if c == "\\":
            if i + 1 >= len(frag):
                raise DslError(f"trailing backslash in {frag!r}")
            nxt = frag[i + 1]
            if nxt not in "wS$":
                raise DslError(f"unsupported escape \\{nxt} in {frag!r}")
            out.append("\\" + nxt)
            i += 2
        elif c == "(":
            depth += 1
            out.append(c)
            i += 1
        elif c == ")":
            depth -= 1
            if depth < 0:
                raise DslError(f"unbalanced ')' in {frag!r}")
            out.append(c)
            i += 1
        elif c == "[":
            j = i + 1
            if j < len(frag) and frag[j] == "^":
                j += 1
            if j < len(frag) and frag[j] == "]":
                j += 1
            while j < len(frag) and frag[j] != "]":
                j += 2 if frag[j] == "\\" else 1
            if j >= len(frag):
                raise DslError(f"unterminated character class in {frag!r}")
            out.append(frag[i:j + 1])
            i = j + 1
        elif c in "{}":
            raise DslError(f"'{c}' not allowed inside a pattern (brackets are space-separated)")
        elif c in "?*+|" or c.isalnum():
            if c in "?*+" and out and out[-1] == "(":
                raise DslError(f"group extensions like '(?' are outside the subset in {frag!r}")
            out.append(c)
            i += 1
        else:
            out.append(re.escape(c))
            i += 1
    if depth:
        raise DslError(f"unbalanced '(' in {frag!r}")
    try:
        pattern = re.compile("".join(out))
    except re.error as exc:
        raise DslError(f"bad pattern {frag!r}: {exc}") from exc
    _COMPILED[frag] = pattern
    return pattern


# ---------------------------------------------------------------------------
# elements

REPEATS = ("1", "?", "*", "+")


@dataclass(frozen=True)
class TokenPattern:
    """Word and tag tests for one token, with a cross-token repetition."""

    word: str | None = None
    tag: str | None = None
    negate_tag: bool = False
    repeat: str = "1"

    def __post_init__(self):
        if self.word is None and self.tag is None and not self.negate_tag:
            pass  # wildcard token is legal (ANYTHING)
        if self.repeat not in REPEATS:
            raise DslError(f"bad repetition {self.repeat!r}")
        if self.word is not None:
            _compile_fragment(self.word)
        if self.tag is not None:
            _compile_fragment(self.tag)

    def matches(self, token) -> bool:
        if self.word is not None and not _compile_fragment(self.word).fullmatch(token.word):
            return False
        if self.tag is not None:
            hit = bool(_compile_fragment(self.tag).fullmatch(token.pos))
            if hit == self.negate_tag:
                return False
        return True


@dataclass(frozen=True)
class Bracket:
    kind: str  # "new" | "old" | "old-opt"
    side: str  # "open" | "close"


_BRACKETS = {
    "{": Bracket("new", "open"),
    "}": Bracket("new", "close"),
    "[": Bracket("old", "open"),
    "]": Bracket("old", "close"),
    "[?": Bracket("old-opt", "open"),
    "]?": Bracket("old-opt", "close"),
}


@dataclass(frozen=True)
class DslRule:
    """One parsed rule: its elements plus the normalized source text."""

    elements: tuple
    pieces: tuple[str, ...]
    line: int = 0

    @property
    def source(self) -> str:
        return " ".join(self.pieces)


_MACRO_REF = re.compile(r"([A-Z][A-Z_]*)([?*+]?)")
_MACRO_NAME = re.compile(r"[A-Z][A-Z_]*")


def _parse_token_pattern(chunk: str) -> TokenPattern:
    repeat = "1"
    for suffix, rep in (("::?", "?"), ("::*", "*"), ("::+", "+")):
        if chunk.endswith(suffix):
            repeat = rep
            chunk = chunk[: -len(suffix)]
            break
    if "::" in chunk:
        raise DslError(f"bad repetition suffix in {chunk!r}")
    # Find the first top-level underscore: the word/tag separator.
    sep = None
    depth = 0
    in_class = False
    i = 0
    while i < len(chunk):
        c = chunk[i]
        if c == "\\":
            i += 2
            continue
        if in_class:
            if c == "]":
                in_class = False
        elif c == "[":
            in_class = True
        elif c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "_" and depth == 0:
            sep = i
            break
        i += 1
    if sep is None:
        raise DslError(f"token pattern {chunk!r} has no word_tag separator")
    word = chunk[:sep]
    tag = chunk[sep + 1:]
    if tag.startswith("_"):
        tag = tag[1:]
    negate = False
    if tag.startswith("!"):
        negate = True
        tag = tag[1:]
    return TokenPattern(word or None, tag or None, negate, repeat)


def parse_rule_line(text: str, macros: "MacroTable", line: int = 0) -> DslRule:
    """Parse one logical rule line; raises DslError with a clear message."""
    pieces = tuple(text.split())
    if not pieces:
        raise DslError("empty rule")
    elements = []
    n_patterns = 0
    open_state = {"new": False, "old": False, "old-opt": False}
    for chunk in pieces:
        br = _BRACKETS.get(chunk)
        if br is not None:
            if br.side == "open":
                if open_state[br.kind]:
                    raise DslError(f"nested {chunk!r} bracket")
                open_state[br.kind] = True
            else:
                if not open_state[br.kind]:
                    raise DslError(f"unbalanced {chunk!r} bracket")
                open_state[br.kind] = False
            elements.append(br)
            continue
        m = _MACRO_REF.fullmatch(chunk)
        if m and _MACRO_NAME.fullmatch(m.group(1)):
            name, suffix = m.group(1), m.group(2)
            base = macros.get(name)
            if base is None:
                raise DslError(f"unknown macro {name!r}")
            pattern = base if not suffix else TokenPattern(
                base.word, base.tag, base.negate_tag, suffix)
            elements.append(pattern)
            n_patterns += 1
            continue
        elements.append(_parse_token_pattern(chunk))
        n_patterns += 1
    open_symbol = {"new": "{", "old": "[", "old-opt": "[?"}
    for kind, is_open in open_state.items():
        if is_open:
            raise DslError(f"unbalanced {open_symbol[kind]!r} bracket")
    if n_patterns == 0:
        raise DslError("rule has no token patterns")
    return DslRule(tuple(elements), pieces, line)


# ---------------------------------------------------------------------------
# macro tables

@dataclass(frozen=True)
class MacroTable:
    patterns: dict[str, TokenPattern]

    def __post_init__(self):
        for name in self.patterns:
            if not _MACRO_NAME.fullmatch(name):
                raise DslError(f"bad macro name {name!r}")

    def get(self, name: str) -> TokenPattern | None:
        return self.patterns.get(name)


def parse_macro_file(text: str) -> MacroTable:
    """One "NAME = pattern" per line; '#' lines are comments.  Macro bodies
    are plain token patterns and cannot reference other macros."""
    table: dict[str, TokenPattern] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, body = line.partition("=")
        name = name.strip()
        body = body.strip()
        if not sep or not body or not _MACRO_NAME.fullmatch(name):
            raise DslError(f"line {lineno}: expected 'NAME = pattern'")
        try:
            table[name] = _parse_token_pattern(body)
        except DslError as exc:
            raise DslError(f"line {lineno}: {exc}") from exc
    return MacroTable(table)


def _load_default_macros() -> MacroTable:
    text = resources.files("chunklab").joinpath("data/default_macros.txt").read_text("utf-8")
    return parse_macro_file(text)


DEFAULT_MACROS = _load_default_macros()


# ---------------------------------------------------------------------------
# rule files

@dataclass(frozen=True)
class RuleListProgram:
    rules: tuple[DslRule, ...]
    macros: MacroTable


@dataclass(frozen=True)
class ParseResult:
    program: RuleListProgram
    diagnostics: tuple[Diagnostic, ...]

    def raise_if_errors(self) -> RuleListProgram:
        if self.diagnostics:
            raise DslError("; ".join(str(d) for d in self.diagnostics))
        return self.program


def parse_rule_file(text: str, macros: MacroTable | None = None) -> ParseResult:
    """Parse a rule file: every non-comment line becomes one rule or one
    line-numbered diagnostic.  Valid rules are kept even when other lines
    fail, so editors can evaluate partial programs."""
    macros = macros if macros is not None else DEFAULT_MACROS
    rules: list[DslRule] = []
    diagnostics: list[Diagnostic] = []
    pending = ""
    pending_line = 0
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip()
        if pending:
            line = pending + " " + line.strip()
            lineno0 = pending_line
            pending = ""
        else:
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            lineno0 = lineno
        if line.rstrip().endswith("\\"):
            pending = line.rstrip()[:-1].rstrip()
            pending_line = lineno0
            continue
        try:
            rules.append(parse_rule_line(line, macros, lineno0))
        except DslError as exc:
            diagnostics.append(Diagnostic(lineno0, str(exc)))
    if pending:
        try:
            rules.append(parse_rule_line(pending, macros, pending_line))
        except DslError as exc:
            diagnostics.append(Diagnostic(pending_line, str(exc)))
    return ParseResult(RuleListProgram(tuple(rules), macros), tuple(diagnostics))


def serialize_program(program: RuleListProgram) -> str:
    return "\n".join(rule.source for rule in program.rules) + "\n"


# ---------------------------------------------------------------------------
# application

def _run_lengths(pattern: TokenPattern, sentence: Sentence, start: int) -> int:
    n = len(sentence)
    end = start
    while end < n and pattern.matches(sentence.tokens[end]):
        end += 1
    return end - start


def _match_at(elements, sentence: Sentence, spans, i: int):
    """First acceptable match starting exactly at token i, or None.

    Yields (end, new_spans) for the greedy-first assignment that satisfies
    all bracket alignment tests and leaves no existing span straddling the
    matched region.
    """
    starts = {s.start for s in spans}
    ends = {s.end for s in spans}

    def region_ok(end: int) -> bool:
        if end <= i:
            return False
        for s in spans:
            inside = s.start >= i and s.end <= end
            outside = s.end <= i or s.start >= end
            if not (inside or outside):
                return False
        return True

    def walk(ei: int, pos: int, open_new: int | None, new_spans: tuple):
        if ei == len(elements):
            if region_ok(pos):
                yield pos, new_spans
            return
        el = elements[ei]
        if isinstance(el, Bracket):
            if el.kind == "new":
                if el.side == "open":
                    yield from walk(ei + 1, pos, pos, new_spans)
                else:
                    added = new_spans + ((open_new, pos),) if pos > open_new else new_spans
                    yield from walk(ei + 1, pos, None, added)
            elif el.kind == "old":
                required = starts if el.side == "open" else ends
                if pos in required:
                    yield from walk(ei + 1, pos, open_new, new_spans)
            else:  # optional old boundary: matches whether or not one is there
                yield from walk(ei + 1, pos, open_new, new_spans)
            return
        # token pattern
        if el.repeat == "1":
            lo = hi = 1
        elif el.repeat == "?":
            lo, hi = 0, 1
        elif el.repeat == "*":
            lo, hi = 0, len(sentence) - pos
        else:
            lo, hi = 1, len(sentence) - pos
        run = min(_run_lengths(el, sentence, pos), hi)
        for k in range(run, lo - 1, -1):
            yield from walk(ei + 1, pos + k, open_new, new_spans)

    return next(walk(0, i, None, ()), None)


def apply_rule(rule: DslRule, bracketed: tuple[Sentence, frozenset]) -> tuple[Sentence, frozenset]:
    """Apply one rule to one bracketed sentence: leftmost match, left to
    right, scan resuming after each matched region; a rule that matches
    nowhere is the identity."""
    sentence, spans = bracketed
    spans = frozenset(spans)
    n = len(sentence)
    regions: list[tuple[int, int]] = []
    installed: list[ChunkSpan] = []
    i = 0
    while i < n:
        m = _match_at(rule.elements, sentence, spans, i)
        if m is None:
            i += 1
            continue
        end, new_spans = m
        regions.append((i, end))
        installed.extend(ChunkSpan(a, b) for a, b in new_spans)
        i = end
    if not regions:
        return sentence, spans
    survivors = [
        s for s in spans
        if not any(a <= s.start and s.end <= b for a, b in regions)
    ]
    result = sorted(survivors + installed)
    prev_end = 0
    for s in result:
        if s.start < prev_end:
            raise AssertionError(f"rule {rule.source!r} produced overlapping spans")
        prev_end = s.end
    return sentence, frozenset(result)


def apply_program(program: RuleListProgram, corpus) -> list[tuple[Sentence, frozenset]]:
    """Rule 1 over every sentence, then rule 2, and so on."""
    state = [(s, frozenset(spans)) for s, spans in corpus]
    for rule in program.rules:
        state = [apply_rule(rule, pair) for pair in state]
    return state


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class RuleDelta:
    index: int
    line: int
    source: str
    f_after: float
    delta: float


@dataclass(frozen=True)
class ProgramReport:
    report: EvalReport
    initial_f: float
    deltas: tuple[RuleDelta, ...]


def evaluate_program(program: RuleListProgram, gold_pairs) -> ProgramReport:
    """Score a rule program against gold chunks, starting from the
    no-bracket state, with the F gained (or lost) by each rule."""
    gold_pairs = list(gold_pairs)
    gold_spans = [lab.spans() for _, lab in gold_pairs]
    state = [(s, frozenset()) for s, _ in gold_pairs]

    def corpus_f(st):
        total = ZERO
        for (_, prop), ref in zip(st, gold_spans):
            total = total + pr_counts(ref, prop)
        return report_from_counts(total)

    prev = corpus_f(state)
    initial_f = prev.fmeasure
    deltas = []
    for idx, rule in enumerate(program.rules):
        state = [apply_rule(rule, pair) for pair in state]
        now = corpus_f(state)
        deltas.append(RuleDelta(idx, rule.line, rule.source,
                                now.fmeasure, now.fmeasure - prev.fmeasure))
        prev = now
    return ProgramReport(prev, initial_f, tuple(deltas))
