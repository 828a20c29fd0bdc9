"""Seeded synthetic corpus of POS-tagged sentences with base-NP chunks.

Sentences come from a small chunk grammar.  Roughly two thirds of the mass
is easy majority patterns that a POS-unigram baseline already gets right;
the rest injects POS ambiguity:

* whole-class ambiguity: VBG and RB tokens are chunk-internal in just under
  half of their occurrences ("the rising rate", "a very big dog") and
  external in the rest ("keeps rising", "ran quickly"), putting a unigram
  baseline near the coin-flip point for those classes;
* word-keyed splits: in post-verbal frames the individual word decides
  ("bought trading shares" keeps the gerund inside the chunk, "bought
  falling rates" does not; likewise "bought very good shares" vs. "bought
  sharply good shares"), so the learner needs separate evidence for every
  word of both classes - a long tail of small regularities;
* adjacent-chunk frames that the tag scheme can only express with a
  chunk-splitting B ("( it ) ( each report )", "( shares ) ( Friday )");
  each of these frames also carries one word-keyed slot, so their sentences
  stay interesting to a disagreement-driven sampler.

Sentence lengths are deliberately similar across frames, so annotated-word
counts compare runs fairly.  Every construction is decidable from a small
token window; the word-keyed tail needs evidence word by word, which is
where disagreement-driven sampling outruns sequential annotation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Labeling, Sentence, Token

__all__ = ["SynthConfig", "generate_corpus", "corpus_summary"]

# Word-keyed split: in post-verbal frames, these join the following chunk ...
VBG_IN = ("trading", "holding", "pricing", "operating", "banking",
          "leasing", "shipping", "mining", "farming", "printing",
          "brewing", "logging", "racing", "gaming", "hiring",
          "baking", "sailing", "welding", "tutoring", "casting")
RB_IN = ("very", "only", "nearly", "quite", "almost",
         "fairly", "rather", "somewhat", "roughly", "truly",
         "mostly", "partly", "barely", "notably", "unusually",
         "solely", "mainly", "wholly", "plainly", "utterly")
# ... and these stay outside.
VBG_OUT = ("rising", "falling", "slipping", "declining", "climbing",
           "soaring", "drifting", "fading", "surging", "sliding",
           "easing", "growing", "slowing", "jumping", "dipping",
           "slumping", "rallying", "firming", "sagging", "rebounding")
RB_OUT = ("quickly", "sharply", "slightly", "widely", "rapidly",
          "steadily", "briefly", "suddenly", "broadly", "firmly",
          "gently", "loudly", "swiftly", "calmly", "eagerly",
          "boldly", "neatly", "softly", "warmly", "keenly")

WORDS = {
    "DT": ["the", "a", "this", "each", "that"],
    "JJ": ["big", "red", "old", "new", "good", "small", "high"],
    "NN": ["dog", "cat", "man", "house", "car", "market", "rate", "price", "report", "plan"],
    "NNS": ["dogs", "cats", "shares", "rates", "prices", "reports"],
    "NNP": ["John", "Mary", "London", "Acme", "Smith"],
    "NNP_DAY": ["Friday", "Monday"],
    "PRP": ["he", "she", "they", "it"],
    "VBD": ["saw", "took", "made", "bought", "sold", "raised", "kept"],
    "VBZ": ["sees", "takes", "makes", "buys", "keeps", "looks"],
    "VBG": list(VBG_IN + VBG_OUT),
    "RB": list(RB_IN + RB_OUT),
    "IN": ["in", "of", "with", "on", "at"],
    "CD": ["5", "10", "42", "100", "250"],
    "POS": ["'s"],
    ".": ["."],
}


@dataclass(frozen=True)
class SynthConfig:
    sentences: int = 2000
    seed: int = 0


class _Builder:
    """Accumulates (word, pos, chunk-id) triples for one sentence."""

    def __init__(self, rng):
        self.rng = rng
        self.items: list[tuple[str, str, int | None]] = []
        self.next_chunk = 0

    def tok(self, pos_class, pos=None, chunk=None, word=None):
        if word is None:
            words = WORDS[pos_class]
            word = words[self.rng.integers(len(words))]
        self.items.append((word, pos or pos_class, chunk))

    def pick(self, words):
        return words[self.rng.integers(len(words))]

    def chunk(self) -> int:
        c = self.next_chunk
        self.next_chunk += 1
        return c

    def np_simple(self, det=True, adjs=None):
        c = self.chunk()
        if det:
            self.tok("DT", chunk=c)
        n_adj = int(self.rng.integers(0, 2)) if adjs is None else adjs
        for _ in range(n_adj):
            self.tok("JJ", chunk=c)
        self.tok("NNS" if self.rng.random() < 0.3 else "NN", chunk=c)
        return c

    def np_prp(self):
        c = self.chunk()
        self.tok("PRP", chunk=c)
        return c

    def np_propn(self, n=1):
        c = self.chunk()
        for _ in range(n):
            self.tok("NNP", chunk=c)
        return c

    def pp(self):
        self.tok("IN")
        self.np_simple()

    def vbg_object(self):
        """Post-verbal "(VBG) NNS": the gerund word decides its membership."""
        if self.rng.random() < 0.5:
            c = self.chunk()
            self.tok("VBG", chunk=c, word=self.pick(VBG_IN))
            self.tok("NNS", chunk=c)
        else:
            self.tok("VBG", word=self.pick(VBG_OUT))
            c = self.chunk()
            self.tok("NNS", chunk=c)

    def rb_jj_object(self):
        """Post-verbal "(RB) JJ NNS": the adverb word decides its membership."""
        if self.rng.random() < 0.5:
            c = self.chunk()
            self.tok("RB", chunk=c, word=self.pick(RB_IN))
            self.tok("JJ", chunk=c)
            self.tok("NNS", chunk=c)
        else:
            self.tok("RB", word=self.pick(RB_OUT))
            c = self.chunk()
            self.tok("JJ", chunk=c)
            self.tok("NNS", chunk=c)

    def finish(self, sentence_id: int) -> tuple[Sentence, Labeling]:
        self.tok(".", pos=".")
        tokens = tuple(Token(w, p) for w, p, _ in self.items)
        tags = []
        prev_chunk = None
        for _, _, chunk in self.items:
            if chunk is None:
                tags.append("O")
            elif chunk == prev_chunk:
                tags.append("I")
            elif prev_chunk is not None and tags and tags[-1] in ("I", "B"):
                tags.append("B")
            else:
                tags.append("I")
            prev_chunk = chunk
        return Sentence(sentence_id, tokens), Labeling(tuple(tags))


# -- easy majority patterns (padded to keep lengths comparable) ----------------

def _p_svo(b):
    b.np_simple()
    b.tok("VBD")
    b.np_simple(adjs=1)
    b.pp()


def _p_prp_vz_o(b):
    b.np_prp()
    b.tok("VBZ")
    b.np_simple(adjs=1)
    b.pp()


def _p_svo_pp(b):
    b.np_simple()
    b.tok("VBD")
    b.np_simple()
    b.pp()
    b.pp()


def _p_propn_pair(b):
    # "( John Smith )" in subject or object position: NNP NNP is one chunk.
    if b.rng.random() < 0.5:
        b.np_propn(n=2)
        b.tok("VBD")
        b.np_simple(adjs=1)
        b.pp()
    else:
        b.np_prp()
        b.tok("VBD")
        b.np_propn(n=2)
        b.pp()
        b.pp()


def _p_compound(b):
    c = b.chunk()
    b.tok("DT", chunk=c)
    b.tok("NN", chunk=c)   # "the market price": noun compound, one chunk
    b.tok("NN", chunk=c)
    b.tok("VBD")
    b.np_simple()
    b.pp()


def _p_num_np(b):
    c = b.chunk()
    b.tok("DT", chunk=c)
    b.tok("CD", chunk=c)
    b.tok("NNS", chunk=c)
    b.tok("VBD")
    b.np_simple(adjs=1)
    b.pp()


# -- whole-class ambiguity: positionally resolvable VBG / RB contexts ---------

def _p_keeps_vbg(b):
    b.np_simple()
    b.tok("VBZ")
    b.tok("VBG")            # "keeps rising": plain verb use, outside
    b.pp()
    if b.rng.random() < 0.5:
        b.tok("RB", word=b.pick(RB_OUT))


def _p_sv_adv(b):
    b.np_simple(adjs=1)
    b.tok("VBD")
    b.tok("RB", word=b.pick(RB_OUT))
    b.pp()


def _p_attrib_vbg(b):
    c = b.chunk()
    b.tok("DT", chunk=c)
    b.tok("VBG", chunk=c)   # "the rising rate": attributive, inside
    b.tok("NN", chunk=c)
    b.tok("VBD")
    b.np_simple()
    b.pp()


def _p_rb_in_np(b):
    c = b.chunk()
    b.tok("DT", chunk=c)
    b.tok("RB", chunk=c, word=b.pick(RB_IN))   # "a very big dog"
    b.tok("JJ", chunk=c)
    b.tok("NN", chunk=c)
    b.tok("VBD")
    b.np_simple()
    b.pp()


def _p_vbg_subject(b):
    c = b.chunk()           # "( trading ) keeps quickly ...": gerund subject
    b.tok("VBG", chunk=c, word=b.pick(VBG_IN))
    b.tok("VBZ")
    b.tok("RB", word=b.pick(RB_OUT))
    b.pp()


# -- word-keyed tail frames -----------------------------------------------------

def _r_vbg_lexical(b):
    b.np_prp() if b.rng.random() < 0.5 else b.np_propn()
    b.tok("VBD")
    b.vbg_object()
    b.pp()


def _r_rb_lexical(b):
    b.np_prp()
    b.tok("VBD")
    b.rb_jj_object()
    b.pp()


def _r_double_lexical(b):
    """Two word-keyed decisions in one sentence: "( he ) bought ( very good
    shares ) with ( trading rates )"."""
    b.np_prp()
    b.tok("VBD")
    b.rb_jj_object()
    b.tok("IN")
    b.vbg_object()


# -- adjacent-chunk frames needing a B tag, each with one keyed slot ------------

def _r_day_split(b):
    b.np_propn()
    b.tok("VBD")
    b.vbg_object()
    c = b.chunk()           # "( Mary ) bought ( trading rates ) ( Friday )"
    b.tok("NNP_DAY", pos="NNP", chunk=c)


def _r_jj_pred(b):
    b.np_simple()
    b.tok("VBZ")
    b.tok("JJ")             # "looks good": predicative, outside
    b.tok("IN")
    b.rb_jj_object()


def _r_prp_dt_split(b):
    b.np_simple(det=True, adjs=0)
    b.tok("VBZ")
    c1 = b.chunk()          # "( it ) ( each report )": adjacent chunks
    b.tok("PRP", chunk=c1)
    c2 = b.chunk()
    b.tok("DT", chunk=c2)
    b.tok("NN", chunk=c2)
    b.tok("IN")
    b.vbg_object()


def _r_cd_pair(b):
    b.np_prp()
    b.tok("VBD")
    if b.rng.random() < 0.5:
        c1 = b.chunk()      # "( only 5 shares ) ( 10 shares )"
        b.tok("RB", chunk=c1, word=b.pick(RB_IN))
        b.tok("CD", chunk=c1)
        b.tok("NNS", chunk=c1)
    else:
        b.tok("RB", word=b.pick(RB_OUT))
        c1 = b.chunk()      # "sharply ( 5 shares ) ( 10 shares )"
        b.tok("CD", chunk=c1)
        b.tok("NNS", chunk=c1)
    c2 = b.chunk()
    b.tok("CD", chunk=c2)
    b.tok("NNS", chunk=c2)


def _r_possessive(b):
    c1 = b.chunk()          # "( the man 's ) ( plan ) raised ( trading rates )"
    b.tok("DT", chunk=c1)
    b.tok("NN", chunk=c1)
    b.tok("POS", chunk=c1)
    c2 = b.chunk()
    b.tok("NN", chunk=c2)
    b.tok("VBD")
    b.vbg_object()


def _r_that_rel(b):
    b.np_simple(det=True, adjs=0)
    b.tok("DT", word="that")  # relative "that": outside any chunk
    b.np_prp()
    b.tok("VBD")
    b.rb_jj_object()


PATTERNS = [
    (_p_svo, 15.0),
    (_p_prp_vz_o, 9.0),
    (_p_svo_pp, 10.0),
    (_p_propn_pair, 8.0),
    (_p_compound, 5.0),
    (_p_num_np, 4.0),
    (_p_keeps_vbg, 6.5),
    (_p_sv_adv, 3.0),
    (_p_attrib_vbg, 3.2),
    (_p_rb_in_np, 3.4),
    (_p_vbg_subject, 0.9),
    (_r_vbg_lexical, 2.0),
    (_r_rb_lexical, 2.0),
    (_r_double_lexical, 8.0),
    (_r_day_split, 3.2),
    (_r_jj_pred, 3.2),
    (_r_prp_dt_split, 3.2),
    (_r_cd_pair, 3.2),
    (_r_possessive, 3.2),
    (_r_that_rel, 3.2),
]


def generate_corpus(config: SynthConfig) -> list[tuple[Sentence, Labeling]]:
    rng = np.random.default_rng(config.seed)
    weights = np.array([w for _, w in PATTERNS])
    probs = weights / weights.sum()
    out = []
    for i in range(config.sentences):
        pattern = PATTERNS[rng.choice(len(PATTERNS), p=probs)][0]
        b = _Builder(rng)
        pattern(b)
        out.append(b.finish(i))
    return out


def corpus_summary(pairs) -> dict:
    tokens = sum(len(s) for s, _ in pairs)
    chunks = sum(len(lab.spans()) for _, lab in pairs)
    return {"sentences": len(pairs), "tokens": tokens, "chunks": chunks}
