"""Transformation-based chunker: baseline POS->tag map plus learned rewrite rules.

Training is the classic greedy loop: annotate with the baseline, then
repeatedly pick the single rewrite rule with the highest net error reduction
on the training set, append it, re-annotate, and stop when no rule gains at
least ``score_threshold``.

Rule application sweeps token positions left to right, rewriting in place:
a condition that looks at the chunk tag of an earlier position sees the tag
as already rewritten by this sweep, while later positions still carry their
pre-sweep tags.  Scoring during training accounts for this exactly, so the
token-level training error provably drops by the accepted rule's score.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .corpus import Labeling, Sentence, normalize_iob1

__all__ = [
    "BOUNDARY",
    "DEFAULT_TEMPLATES",
    "TransformRule",
    "InitialAnnotator",
    "Chunker",
    "TrainConfig",
    "TblError",
    "train_initial",
    "learn_rules",
    "apply_chunker",
    "apply_chunker_batch",
    "serialize_chunker",
    "deserialize_chunker",
]

# Distinguished value matched by out-of-sentence offsets; never a real
# word, POS tag or chunk tag.
BOUNDARY = "<<boundary>>"

FEATURES = ("word", "pos", "chunktag")
_TAG_CODE = {"I": 0, "O": 1, "B": 2, BOUNDARY: 3}
_CODE_TAG = {v: k for k, v in _TAG_CODE.items()}


class TblError(ValueError):
    """Bad rule text, bad training input, or a malformed chunker file."""


def _ctx(feature: str, *offset_groups):
    return tuple(tuple((feature, o) for o in offs) for offs in offset_groups)


# Condition templates: which (feature, offset) slots a learned rule may test.
# A tractable stand-in for full Brill-style chunking template inventories.
DEFAULT_TEMPLATES: tuple[tuple[tuple[str, int], ...], ...] = (
    _ctx("chunktag", (-1,), (-2, -1), (1,), (1, 2), (-1, 1))
    + _ctx("pos", (0,), (-1,), (1,), (-1, 0), (0, 1), (-2, -1), (1, 2), (-1, 1))
    + _ctx("word", (0,), (-1,), (1,), (-1, 0), (0, 1))
    + ((("word", 0), ("pos", -1)), (("word", 0), ("pos", 1)))
)


@dataclass(frozen=True)
class TransformRule:
    """Rewrite the chunk tag at the current position from old to new.

    Fires only where every (feature, offset, value) test holds; tests are
    kept sorted so equal rules serialize identically.
    """

    tests: tuple[tuple[str, int, str], ...]
    old: str
    new: str

    def __post_init__(self):
        if self.old == self.new:
            raise TblError("rule must change the tag")
        if self.old not in _TAG_CODE or self.new not in _TAG_CODE or BOUNDARY in (self.old, self.new):
            raise TblError(f"bad action tags {self.old!r}>{self.new!r}")
        tests = tuple(sorted(self.tests))
        if not tests:
            raise TblError("rule needs at least one test")
        for feat, off, value in tests:
            if feat not in FEATURES:
                raise TblError(f"unknown feature {feat!r}")
            if not -3 <= off <= 3:
                raise TblError(f"offset {off} outside window")
            if feat == "chunktag" and value not in _TAG_CODE:
                raise TblError(f"bad chunk tag value {value!r}")
        object.__setattr__(self, "tests", tests)

    @property
    def template(self) -> tuple[tuple[str, int], ...]:
        return tuple((f, o) for f, o, _ in self.tests)

    def serialize(self) -> str:
        cond = " ".join(f"{f}[{o}]={v}" for f, o, v in self.tests)
        return f"{cond} : {self.old}>{self.new}"

    @classmethod
    def parse(cls, text: str) -> "TransformRule":
        head, sep, action = text.partition(" : ")
        m = re.fullmatch(r"([IOB])>([IOB])", action.strip())
        if not sep or not m:
            raise TblError(f"bad rule text: {text!r}")
        tests = []
        for piece in head.split():
            tm = re.fullmatch(r"(word|pos|chunktag)\[(-?\d+)\]=(.+)", piece)
            if not tm:
                raise TblError(f"bad rule test: {piece!r}")
            tests.append((tm.group(1), int(tm.group(2)), tm.group(3)))
        return cls(tuple(tests), m.group(1), m.group(2))


@dataclass(frozen=True)
class InitialAnnotator:
    """Baseline annotation: each POS maps to its majority chunk tag."""

    tag_for_pos: dict[str, str]
    default: str = "O"

    def __post_init__(self):
        if self.default not in ("I", "O"):
            raise TblError("default tag must be I or O")
        for pos, tag in self.tag_for_pos.items():
            if tag not in ("I", "O"):
                raise TblError(f"initial tag for {pos!r} must be I or O, got {tag!r}")

    def tag(self, pos: str) -> str:
        return self.tag_for_pos.get(pos, self.default)


@dataclass(frozen=True)
class Chunker:
    """Baseline annotator plus an ordered transformation rule list."""

    initial: InitialAnnotator
    rules: tuple[TransformRule, ...] = ()


@dataclass(frozen=True)
class TrainConfig:
    templates: tuple = DEFAULT_TEMPLATES
    score_threshold: int = 2
    max_rules: int = 500

    def __post_init__(self):
        if self.score_threshold < 1:
            raise TblError("score_threshold must be >= 1")
        if self.max_rules < 0:
            raise TblError("max_rules must be >= 0")


def train_initial(training) -> InitialAnnotator:
    """Map each POS to its most frequent chunk tag; B counts as I, ties go to I."""
    training = list(training)
    if not training:
        raise TblError("empty training set")
    counts: dict[str, list[int]] = {}
    for sent, lab in training:
        for tok, tag in zip(sent.tokens, lab.tags):
            c = counts.setdefault(tok.pos, [0, 0])
            c[0 if tag in ("I", "B") else 1] += 1
    table = {pos: ("I" if i >= o else "O") for pos, (i, o) in counts.items()}
    return InitialAnnotator(table, default="O")


# ---------------------------------------------------------------------------
# rule application

def _feature_value(rule_feat, sentence: Sentence, tags, j: int) -> str:
    if not 0 <= j < len(tags):
        return BOUNDARY
    tok = sentence.tokens[j]
    if rule_feat == "word":
        return tok.word
    if rule_feat == "pos":
        return tok.pos
    return tags[j]


def _sweep_rule(rule: TransformRule, sentence: Sentence, tags: list[str]) -> None:
    for i in range(len(tags)):
        if tags[i] != rule.old:
            continue
        if all(_feature_value(f, sentence, tags, i + o) == v for f, o, v in rule.tests):
            tags[i] = rule.new


def apply_chunker(chunker: Chunker, sentence: Sentence) -> Labeling:
    """Annotate one sentence: baseline tags, each rule swept in order, then
    the result normalized to a valid IOB1 sequence."""
    tags = [chunker.initial.tag(t.pos) for t in sentence.tokens]
    for rule in chunker.rules:
        _sweep_rule(rule, sentence, tags)
    return Labeling(normalize_iob1(tags))


# ---------------------------------------------------------------------------
# vectorized corpus encoding (shared by the trainer and batch application)

_PAD = 3  # >= max |offset|


class _Encoded:
    """Sentences flattened into int arrays with boundary padding between them."""

    def __init__(self, sentences):
        self.word_ids: dict[str, int] = {BOUNDARY: 0}
        self.pos_ids: dict[str, int] = {BOUNDARY: 0}
        total = sum(len(s) for s in sentences) + _PAD * (len(sentences) + 1)
        self.words = np.zeros(total, dtype=np.int64)
        self.pos = np.zeros(total, dtype=np.int64)
        self.sent_of = np.full(total, -1, dtype=np.int64)
        self.valid = np.zeros(total, dtype=bool)
        self.bounds: list[tuple[int, int]] = []
        at = _PAD
        for si, sent in enumerate(sentences):
            for tok in sent.tokens:
                self.words[at] = self.word_ids.setdefault(tok.word, len(self.word_ids))
                self.pos[at] = self.pos_ids.setdefault(tok.pos, len(self.pos_ids))
                self.sent_of[at] = si
                self.valid[at] = True
                at += 1
            self.bounds.append((at - len(sent), at))
            at += _PAD

    def encode_tags(self, labelings) -> np.ndarray:
        out = np.full(len(self.words), _TAG_CODE[BOUNDARY], dtype=np.int64)
        for (start, end), lab in zip(self.bounds, labelings):
            out[start:end] = [_TAG_CODE[t] for t in lab.tags]
        return out

    def initial_tags(self, annot: InitialAnnotator) -> np.ndarray:
        lut = np.full(len(self.pos_ids), _TAG_CODE[annot.default], dtype=np.int64)
        for pos, pid in self.pos_ids.items():
            if pos != BOUNDARY:
                lut[pid] = _TAG_CODE[annot.tag(pos)]
        out = lut[self.pos]
        out[~self.valid] = _TAG_CODE[BOUNDARY]
        return out

    def decode_labelings(self, cur: np.ndarray) -> list[Labeling]:
        out = []
        for start, end in self.bounds:
            tags = [_CODE_TAG[int(c)] for c in cur[start:end]]
            out.append(Labeling(normalize_iob1(tags)))
        return out


def _encode_rule(enc: _Encoded, rule: TransformRule):
    """Rule with values translated to this encoding's ids (-1 = matches nothing)."""
    tests = []
    for feat, off, val in rule.tests:
        if feat == "word":
            code = enc.word_ids.get(val, -1)
        elif feat == "pos":
            code = enc.pos_ids.get(val, -1)
        else:
            code = _TAG_CODE[val]
        tests.append((feat, off, code))
    return tests, _TAG_CODE[rule.old], _TAG_CODE[rule.new]


def _rule_is_dynamic(tests) -> bool:
    return any(f == "chunktag" and o < 0 for f, o, _ in tests)


def _static_part_mask(enc: _Encoded, cur: np.ndarray, tests, old: int) -> np.ndarray:
    """Positions passing every test that cannot change during a sweep."""
    mask = enc.valid & (cur == old)
    for feat, off, code in tests:
        if feat == "chunktag" and off < 0:
            continue
        arr = enc.words if feat == "word" else enc.pos if feat == "pos" else cur
        mask &= np.roll(arr, -off) == code
    return mask


def _sweep_positions(enc: _Encoded, cur: np.ndarray, tests, old: int, new: int, positions) -> int:
    """In-place left-to-right sweep over candidate positions; returns #rewrites."""
    neg = [(off, code) for feat, off, code in tests if feat == "chunktag" and off < 0]
    fired = 0
    for p in positions:
        if all(cur[p + off] == code for off, code in neg):
            cur[p] = new
            fired += 1
    return fired


def _apply_rule_flat(enc: _Encoded, cur: np.ndarray, rule: TransformRule) -> None:
    tests, old, new = _encode_rule(enc, rule)
    mask = _static_part_mask(enc, cur, tests, old)
    if not _rule_is_dynamic(tests):
        cur[mask] = new
        return
    full = mask.copy()
    for feat, off, code in tests:
        if feat == "chunktag" and off < 0:
            full &= np.roll(cur, -off) == code
    hit_sents = np.unique(enc.sent_of[full])
    if len(hit_sents) == 0:
        return
    keep = np.isin(enc.sent_of, hit_sents)
    _sweep_positions(enc, cur, tests, old, new, np.flatnonzero(mask & keep))


def apply_chunker_batch(chunker: Chunker, sentences) -> list[Labeling]:
    """Vectorized equivalent of mapping apply_chunker over many sentences."""
    sentences = list(sentences)
    if not sentences:
        return []
    enc = _Encoded(sentences)
    cur = enc.initial_tags(chunker.initial)
    for rule in chunker.rules:
        _apply_rule_flat(enc, cur, rule)
    return enc.decode_labelings(cur)


# ---------------------------------------------------------------------------
# training

class _Trainer:
    def __init__(self, training, config: TrainConfig):
        self.config = config
        sentences = [s for s, _ in training]
        self.enc = _Encoded(sentences)
        self.gold = self.enc.encode_tags([lab for _, lab in training])
        self.templates = tuple(tuple(t) for t in config.templates)
        self.max_slots = max(len(t) for t in self.templates)
        self.V = np.int64(max(len(self.enc.word_ids), len(self.enc.pos_ids), len(_TAG_CODE)))
        width = len(self.templates) * int(self.V) ** self.max_slots * 16
        if width > 2**62:
            raise TblError("vocabulary too large for packed template keys")
        self.dyn_templates = [
            ti for ti, tmpl in enumerate(self.templates)
            if any(f == "chunktag" and o < 0 for f, o in tmpl)
        ]
        self._word_of = {v: k for k, v in self.enc.word_ids.items()}
        self._pos_of = {v: k for k, v in self.enc.pos_ids.items()}

    def _template_keys(self, cur: np.ndarray, valid_idx: np.ndarray) -> np.ndarray:
        """Packed (template, values...) key per template per valid position."""
        keys = np.empty((len(self.templates), len(valid_idx)), dtype=np.int64)
        for ti, tmpl in enumerate(self.templates):
            code = np.full(len(valid_idx), ti, dtype=np.int64)
            for feat, off in tmpl:
                arr = self.enc.words if feat == "word" else self.enc.pos if feat == "pos" else cur
                code = code * self.V + arr[valid_idx + off]
            for _ in range(self.max_slots - len(tmpl)):
                code = code * self.V
            keys[ti] = code
        return keys

    def _decode_candidate(self, packed: int) -> TransformRule:
        new = packed % 4
        packed //= 4
        old = packed % 4
        key = packed // 4
        vals = []
        for _ in range(self.max_slots):
            vals.append(int(key % self.V))
            key //= self.V
        vals.reverse()
        ti = int(key)
        tmpl = self.templates[ti]
        tests = []
        for (feat, off), v in zip(tmpl, vals):
            value = self._word_of[v] if feat == "word" else self._pos_of[v] if feat == "pos" else _CODE_TAG[v]
            tests.append((feat, off, value))
        return TransformRule(tuple(tests), _CODE_TAG[int(old)], _CODE_TAG[int(new)])

    def _coded_tests(self, packed: int):
        """Candidate's tests in id form, without a string round-trip."""
        rest = packed // 16
        vals = []
        for _ in range(self.max_slots):
            vals.append(int(rest % self.V))
            rest //= self.V
        vals.reverse()
        tmpl = self.templates[int(rest)]
        return [(feat, off, vals[slot]) for slot, (feat, off) in enumerate(tmpl)]

    def _candidate_parts(self, packed: np.ndarray):
        new = packed % 4
        rest = packed // 4
        old = rest % 4
        key = rest // 4
        vals = []
        k = key.copy()
        for _ in range(self.max_slots):
            vals.append(k % self.V)
            k //= self.V
        vals.reverse()
        return key, old, new, vals, k  # k holds the template index

    def _simulate(self, cur: np.ndarray, tests, old: int, new: int, sent_ids) -> int:
        """Exact error delta of one sweep restricted to the given sentences."""
        delta = 0
        gold = self.gold
        for si in sent_ids:
            start, end = self.enc.bounds[int(si)]
            seg = cur[start:end].copy()
            static = _static_part_mask_seg(self.enc, cur, seg, tests, old, start, end)
            neg = [(off, code) for feat, off, code in tests if feat == "chunktag" and off < 0]
            for i in range(end - start):
                if not static[i]:
                    continue
                ok = True
                for off, code in neg:
                    j = i + off
                    v = seg[j] if 0 <= j < end - start else _TAG_CODE[BOUNDARY]
                    if v != code:
                        ok = False
                        break
                if ok:
                    p = start + i
                    if gold[p] == new:
                        delta += 1
                    elif gold[p] == old:
                        delta -= 1
                    seg[i] = new
        return delta

    def find_best_rule(self, cur: np.ndarray):
        """Highest exact-scoring rule, ties broken by canonical serialization."""
        enc = self.enc
        valid_idx = np.flatnonzero(enc.valid)
        cur_v = cur[valid_idx]
        gold_v = self.gold[valid_idx]
        err = cur_v != gold_v
        if not err.any():
            return None
        keys = self._template_keys(cur, valid_idx)

        cand = (keys[:, err] * 4 + cur_v[err]) * 4 + gold_v[err]
        cand_packed, fix = np.unique(cand, return_counts=True)

        corr = ~err
        bkeys = keys[:, corr] * 4 + cur_v[corr]
        bu, bc = np.unique(bkeys, return_counts=True)
        key_old = cand_packed // 4
        if len(bu):
            pos_in_bu = np.searchsorted(bu, key_old)
            pos_in_bu[pos_in_bu >= len(bu)] = 0
            breaks = np.where(bu[pos_in_bu] == key_old, bc[pos_in_bu], 0)
        else:
            breaks = np.zeros(len(cand_packed), dtype=np.int64)
        scores = fix.astype(np.int64) - breaks

        key, old, new, vals, tidx = self._candidate_parts(cand_packed)

        # Candidates whose own rewrites can enable or block later matches in
        # a sweep need exact simulation; for everyone else static == exact.
        needs_sim = np.zeros(len(cand_packed), dtype=bool)
        for ti in self.dyn_templates:
            sel = tidx == ti
            if not sel.any():
                continue
            inter = np.zeros(sel.sum(), dtype=bool)
            for slot, (feat, off) in enumerate(self.templates[ti]):
                if feat == "chunktag" and off < 0:
                    v = vals[slot][sel]
                    inter |= (v == old[sel]) | (v == new[sel])
            needs_sim[sel] = inter

        if needs_sim.any():
            for ti in self.dyn_templates:
                sel = np.flatnonzero(needs_sim & (tidx == ti))
                if len(sel) == 0:
                    continue
                pk = keys[ti] * 4 + cur_v
                order = np.argsort(pk, kind="stable")
                pk_sorted = pk[order]
                for ci in sel:
                    want = int(key_old[ci])
                    lo = np.searchsorted(pk_sorted, want, side="left")
                    hi = np.searchsorted(pk_sorted, want, side="right")
                    if lo == hi:
                        scores[ci] = 0
                        continue
                    positions = valid_idx[order[lo:hi]]
                    sents = np.unique(enc.sent_of[positions])
                    tests = self._coded_tests(int(cand_packed[ci]))
                    scores[ci] = self._simulate(cur, tests, int(old[ci]), int(new[ci]), sents)

        best_score = int(scores.max())
        if best_score < self.config.score_threshold:
            return None
        at = np.flatnonzero(scores == best_score)
        rules = [self._decode_candidate(int(cand_packed[i])) for i in at]
        best = min(rules, key=lambda r: r.serialize())
        return best, best_score


def _static_part_mask_seg(enc, cur, seg, tests, old, start, end):
    """Per-token static eligibility within one sentence (seg is its tag copy)."""
    n = end - start
    mask = np.ones(n, dtype=bool)
    mask &= cur[start:end] == old
    for feat, off, code in tests:
        if feat == "chunktag" and off < 0:
            continue
        if feat == "chunktag":
            vals = np.full(n, _TAG_CODE[BOUNDARY], dtype=np.int64)
            lo = max(0, -off)
            hi = min(n, n - off)
            vals[lo:hi] = seg[lo + off:hi + off]
        else:
            arr = enc.words if feat == "word" else enc.pos
            vals = arr[start + off:end + off]
        mask &= vals == code
    return mask


def learn_rules(training, config: TrainConfig | None = None) -> Chunker:
    """Greedy transformation learning over the template inventory.

    Deterministic: ties on score go to the rule with the lexicographically
    smallest serialization, so identical input yields an identical rule list.
    """
    training = list(training)
    if not training:
        raise TblError("empty training set")
    config = config or TrainConfig()
    initial = train_initial(training)
    trainer = _Trainer(training, config)
    cur = trainer.enc.initial_tags(initial)
    rules: list[TransformRule] = []
    while len(rules) < config.max_rules:
        found = trainer.find_best_rule(cur)
        if found is None:
            break
        rule, score = found
        before = int(np.count_nonzero((cur != trainer.gold) & trainer.enc.valid))
        _apply_rule_flat(trainer.enc, cur, rule)
        after = int(np.count_nonzero((cur != trainer.gold) & trainer.enc.valid))
        if before - after != score:
            raise AssertionError(
                f"rule score {score} != realized error reduction {before - after}"
            )
        rules.append(rule)
    return Chunker(initial, tuple(rules))


# ---------------------------------------------------------------------------
# text format

def serialize_chunker(chunker: Chunker) -> str:
    """Render a chunker to its text form.

    Header line with the default tag, one "POS TAG" line per baseline entry
    (sorted), one blank line, then one canonical rule per line.
    """
    lines = [f"default {chunker.initial.default}"]
    for pos, tag in sorted(chunker.initial.tag_for_pos.items()):
        lines.append(f"{pos} {tag}")
    lines.append("")
    for rule in chunker.rules:
        lines.append(rule.serialize())
    return "\n".join(lines) + "\n"


def deserialize_chunker(text: str) -> Chunker:
    """Inverse of serialize_chunker; '#' lines are ignored."""
    lines = [ln for ln in text.split("\n") if not ln.startswith("#")]
    it = iter(enumerate(lines, start=1))
    header = None
    for lineno, ln in it:
        if ln.strip():
            header = ln
            break
    if header is None or not header.startswith("default "):
        raise TblError("missing 'default TAG' header line")
    default = header.split()[1]
    table: dict[str, str] = {}
    rules: list[TransformRule] = []
    in_rules = False
    for lineno, ln in it:
        if not ln.strip():
            in_rules = True
            continue
        if not in_rules:
            fields = ln.split()
            if len(fields) != 2:
                raise TblError(f"line {lineno}: expected 'POS TAG'")
            table[fields[0]] = fields[1]
        else:
            try:
                rules.append(TransformRule.parse(ln))
            except TblError as exc:
                raise TblError(f"line {lineno}: {exc}") from exc
    return Chunker(InitialAnnotator(table, default=default), tuple(rules))
