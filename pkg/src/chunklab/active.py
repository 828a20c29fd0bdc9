"""Query-by-committee active learning over the transformation-based chunker.

Each iteration: split the annotated pool into committee subsets, train one
chunker per subset, score every unannotated sentence by committee
disagreement, hand the top batch to the annotator, and fold the new
annotations back in.  Two disagreement measures are provided:

* vote entropy: per-token entropy of the committee's tag votes, normalized
  by log(committee size), averaged over the sentence;
* f-complement: half the sum over ordered member pairs of one minus the
  chunk F1 of one member's labeling scored against the other's.

All randomness flows from a single integer seed through numpy's seeded
generator, so runs are replayable.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import Labeling, Sentence
from .metrics import evaluate_corpus, f_beta, pr_counts
from .tbl import Chunker, TrainConfig, apply_chunker_batch, learn_rules

__all__ = [
    "ALConfig",
    "CommitteeSplit",
    "ALHistory",
    "IterationRecord",
    "OracleAnnotator",
    "ALAbort",
    "bagging_split",
    "nfold_split",
    "vote_entropy_sentence",
    "f_complement_sentence",
    "train_committee",
    "score_pool",
    "select_batch",
    "choose_batch",
    "run_active_learning",
    "run_sequential",
]

log = logging.getLogger(__name__)

MEASURES = ("vote-entropy", "f-complement")
SPLITS = ("bagging", "nfold")


@dataclass(frozen=True)
class ALConfig:
    """Knobs for one active-learning run."""

    seed_size: int = 100
    batch_size: int = 50
    committee_size: int = 3
    split: str = "bagging"
    measure: str = "f-complement"
    iterations: int | None = None  # None = run until the pool is exhausted
    seed: int = 0
    tbl: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        if self.seed_size < 1 or self.batch_size < 1:
            raise ValueError("seed_size and batch_size must be >= 1")
        if self.committee_size < 2:
            raise ValueError("committee_size must be >= 2")
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")


@dataclass(frozen=True)
class CommitteeSplit:
    """Per-member training id lists; repeats weight a sentence, and no two
    members train on the identical multiset."""

    members: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = set()
        for member in self.members:
            if not member:
                raise ValueError("empty committee subset")
            key = tuple(sorted(member))
            if key in seen:
                raise ValueError("identical committee subsets")
            seen.add(key)


def bagging_split(ids, committee_size: int, rng: np.random.Generator) -> CommitteeSplit:
    """Sample ceil(2n/3) sentences with replacement for each member."""
    ids = list(ids)
    n = len(ids)
    if n < 2:
        raise ValueError("need at least 2 sentences to form non-identical subsets")
    size = -(-2 * n // 3)
    members: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(committee_size):
        for _attempt in range(100):
            draw = tuple(ids[i] for i in rng.integers(0, n, size))
            if tuple(sorted(draw)) not in seen:
                break
        else:
            raise ValueError("could not draw non-identical committee subsets")
        seen.add(tuple(sorted(draw)))
        members.append(draw)
    return CommitteeSplit(tuple(members))


def nfold_split(ids, committee_size: int) -> CommitteeSplit:
    """Partition ids round-robin into m folds; member i trains on all but fold i."""
    ids = sorted(ids)
    if len(ids) < committee_size:
        raise ValueError("fewer sentences than committee members")
    folds = [ids[i::committee_size] for i in range(committee_size)]
    members = []
    for i in range(committee_size):
        member = [x for j, fold in enumerate(folds) if j != i for x in fold]
        members.append(tuple(sorted(member)))
    return CommitteeSplit(tuple(members))


# ---------------------------------------------------------------------------
# disagreement measures

def _tags_of(labeling):
    return labeling.tags if isinstance(labeling, Labeling) else tuple(labeling)


def vote_entropy_sentence(labelings) -> float:
    """Mean per-token vote entropy, normalized by log(committee size).

    0 when every member tags every token identically; the log base cancels.
    Accepts Labeling values or plain tag sequences (the measure is defined
    over the votes themselves).
    """
    rows = [_tags_of(lab) for lab in labelings]
    k = len(rows)
    if k < 2:
        raise ValueError("need at least 2 labelings")
    n = len(rows[0])
    if any(len(row) != n for row in rows):
        raise ValueError("labeling length mismatch")
    log_k = math.log(k)
    total = 0.0
    for i in range(n):
        votes: dict[str, int] = {}
        for row in rows:
            votes[row[i]] = votes.get(row[i], 0) + 1
        h = 0.0
        for v in votes.values():
            p = v / k
            h -= p * math.log(p)
        total += h / log_k
    return total / n


def f_complement_sentence(labelings) -> float:
    """Half the sum of (1 - F1) over ordered member pairs.

    F1 is symmetric in the two span sets, so this equals the plain sum over
    unordered pairs.  Two members proposing no chunks at all agree perfectly
    (F1 = 1) and contribute nothing.
    """
    spans = [lab.spans() for lab in labelings]
    if len(spans) < 2:
        raise ValueError("need at least 2 labelings")
    total = 0.0
    for i in range(len(spans)):
        for j in range(i + 1, len(spans)):
            total += 1.0 - f_beta(pr_counts(spans[i], spans[j]))
    return total


_MEASURE_FNS = {
    "vote-entropy": vote_entropy_sentence,
    "f-complement": f_complement_sentence,
}


# ---------------------------------------------------------------------------
# committee and batch selection

def train_committee(annotated: dict[int, tuple[Sentence, Labeling]], split: CommitteeSplit,
                    tbl_config: TrainConfig) -> list[Chunker]:
    return [
        learn_rules([annotated[i] for i in member], tbl_config)
        for member in split.members
    ]


def score_pool(committee, pool_sentences, measure: str) -> list[tuple[int, float]]:
    """One disagreement score per pool sentence, in ascending id order."""
    fn = _MEASURE_FNS[measure]
    pool = sorted(pool_sentences, key=lambda s: s.id)
    member_labelings = [apply_chunker_batch(c, pool) for c in committee]
    scores = []
    for idx, sent in enumerate(pool):
        labs = [ml[idx] for ml in member_labelings]
        scores.append((sent.id, fn(labs)))
    return scores


def select_batch(scores, batch_size: int) -> list[int]:
    """Ids of the top-scoring sentences; ties prefer the smaller id, and the
    result is sorted by id."""
    scores = list(scores)
    if batch_size > len(scores):
        log.warning("batch size %d exceeds pool size %d; returning whole pool",
                    batch_size, len(scores))
        batch_size = len(scores)
    ranked = sorted(scores, key=lambda kv: (-kv[1], kv[0]))
    return sorted(i for i, _ in ranked[:batch_size])


def choose_batch(annotated: dict[int, tuple[Sentence, Labeling]], pool_sentences,
                 config: ALConfig, rng: np.random.Generator) -> list[int]:
    """Train a committee on the annotated set and pick the next batch from
    the pool by disagreement."""
    ids = sorted(annotated)
    if config.split == "bagging":
        split = bagging_split(ids, config.committee_size, rng)
    else:
        split = nfold_split(ids, config.committee_size)
    committee = train_committee(annotated, split, config.tbl)
    scores = score_pool(committee, pool_sentences, config.measure)
    return select_batch(scores, config.batch_size)


# ---------------------------------------------------------------------------
# the full loop

@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    sentences: int
    words: int
    test_precision: float
    test_recall: float
    test_f: float
    elapsed_seconds: float

    CSV_HEADER = "iteration,sentences,words,test_precision,test_recall,test_f,elapsed_seconds"

    def to_csv_row(self) -> str:
        return (f"{self.iteration},{self.sentences},{self.words},"
                f"{self.test_precision:.6f},{self.test_recall:.6f},"
                f"{self.test_f:.6f},{self.elapsed_seconds:.3f}")


@dataclass
class ALHistory:
    """One row per iteration plus the resolved run configuration."""

    rows: list[IterationRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, row: IterationRecord) -> None:
        if self.rows and row.words <= self.rows[-1].words:
            raise ValueError("annotated word count must strictly increase")
        self.rows.append(row)

    def to_csv(self) -> str:
        lines = [f"# {k}={self.metadata[k]}" for k in sorted(self.metadata)]
        lines.append(IterationRecord.CSV_HEADER)
        lines.extend(r.to_csv_row() for r in self.rows)
        return "\n".join(lines) + "\n"


class OracleAnnotator:
    """Answers annotation requests from a gold corpus, as an idealized
    perfectly-consistent annotator."""

    def __init__(self, gold: dict[int, Labeling]):
        self.gold = dict(gold)

    def annotate(self, ids) -> dict[int, Labeling]:
        return {i: self.gold[i] for i in ids}


class ALAbort(RuntimeError):
    """Annotator failure mid-run; carries the loop state for resumption."""

    def __init__(self, message: str, state: "ALState"):
        super().__init__(message)
        self.state = state


@dataclass
class ALState:
    """Resumable loop state: what is annotated, what remains, what happened."""

    config: ALConfig
    sentences: dict[int, Sentence]
    annotated: dict[int, tuple[Sentence, Labeling]]
    pool_ids: list[int]
    iteration: int
    history: ALHistory


def _annotate(annotator, ids, state) -> dict[int, Labeling]:
    try:
        got = annotator.annotate(list(ids))
    except Exception as exc:
        raise ALAbort(f"annotator failed at iteration {state.iteration + 1}: {exc}", state) from exc
    if set(got) != set(ids):
        raise ALAbort(f"annotator returned wrong ids at iteration {state.iteration + 1}", state)
    return got


def _record(state: ALState, test_set, elapsed: float) -> None:
    pairs = [state.annotated[i] for i in sorted(state.annotated)]
    chunker = learn_rules(pairs, state.config.tbl)
    predicted = apply_chunker_batch(chunker, [s for s, _ in test_set])
    report = evaluate_corpus([lab for _, lab in test_set], predicted)
    words = sum(len(s) for s, _ in pairs)
    state.history.append(IterationRecord(
        state.iteration, len(pairs), words,
        report.precision, report.recall, report.fmeasure, elapsed,
    ))


def _run(corpus, config: ALConfig, annotator, test_set, mode: str,
         state: ALState | None) -> ALHistory:
    corpus = list(corpus)
    test_set = list(test_set)
    if state is None:
        if len(corpus) <= config.seed_size:
            raise ValueError("corpus not larger than the seed set")
        sentences = {s.id: s for s in corpus}
        if len(sentences) != len(corpus):
            raise ValueError("duplicate sentence ids in corpus")
        order = [s.id for s in corpus]
        seed_ids = order[:config.seed_size]
        state = ALState(config, sentences, {}, order[config.seed_size:], 0,
                        ALHistory(metadata={
                            "mode": mode,
                            "measure": config.measure,
                            "split": config.split,
                            "seed": config.seed,
                            "seed_size": config.seed_size,
                            "batch_size": config.batch_size,
                            "committee_size": config.committee_size,
                            "iterations": config.iterations,
                            "test_model": "retrained-on-all-annotated",
                        }))
        got = _annotate(annotator, seed_ids, state)
        state.annotated = {i: (state.sentences[i], got[i]) for i in seed_ids}
        _record(state, test_set, 0.0)

    while state.pool_ids and (config.iterations is None or state.iteration < config.iterations):
        if mode == "active":
            rng = np.random.default_rng([config.seed, state.iteration + 1])
            pool = [state.sentences[i] for i in sorted(state.pool_ids)]
            batch = choose_batch(state.annotated, pool, config, rng)
        else:
            batch = state.pool_ids[:config.batch_size]
        got = _annotate(annotator, batch, state)
        for i in batch:
            state.annotated[i] = (state.sentences[i], got[i])
        state.pool_ids = [i for i in state.pool_ids if i not in set(batch)]
        state.iteration += 1
        _record(state, test_set, 0.0)
    return state.history


def run_active_learning(corpus, config: ALConfig, annotator, test_set,
                        state: ALState | None = None) -> ALHistory:
    """Run the committee loop until the iteration budget or the pool runs out.

    The elapsed_seconds column is human annotation time; simulated runs
    record 0.0 so that fixed-seed histories compare equal.  On annotator
    failure an ALAbort carries the state; passing it back resumes the run.
    """
    return _run(corpus, config, annotator, test_set, "active", state)


def run_sequential(corpus, config: ALConfig, annotator, test_set,
                   state: ALState | None = None) -> ALHistory:
    """Same loop, but batches are taken in corpus order (no committee)."""
    return _run(corpus, config, annotator, test_set, "sequential", state)
