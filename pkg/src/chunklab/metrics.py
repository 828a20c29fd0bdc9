"""Chunk-level precision, recall and F-measure.

Scoring is by exact span match: a proposed chunk counts as correct only if
an identical [start, end) span exists in the reference.  Corpus scores are
micro-averaged (counts pooled over sentences before computing ratios).

Degenerate cases follow two conventions, needed so that pairwise
disagreement of empty labelings is well defined:

* no proposed and no reference chunks -> P = R = F = 1 (perfect agreement);
* otherwise, zero correct chunks -> F = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["PRCounts", "pr_counts", "precision", "recall", "f_beta", "EvalReport", "evaluate_corpus"]


@dataclass(frozen=True)
class PRCounts:
    """Matched / proposed / reference chunk counts for one or more sentences."""

    correct: int
    proposed: int
    reference: int

    def __post_init__(self):
        if min(self.correct, self.proposed, self.reference) < 0:
            raise ValueError("negative counts")
        if self.correct > min(self.proposed, self.reference):
            raise ValueError("correct exceeds proposed or reference")

    def __add__(self, other: "PRCounts") -> "PRCounts":
        return PRCounts(
            self.correct + other.correct,
            self.proposed + other.proposed,
            self.reference + other.reference,
        )


ZERO = PRCounts(0, 0, 0)


def pr_counts(reference, proposed) -> PRCounts:
    """Count exact span matches between a reference and a proposed span set."""
    ref = frozenset(reference)
    prop = frozenset(proposed)
    return PRCounts(len(ref & prop), len(prop), len(ref))


def precision(counts: PRCounts) -> float:
    if counts.proposed == 0:
        return 1.0 if counts.reference == 0 else 0.0
    return counts.correct / counts.proposed


def recall(counts: PRCounts) -> float:
    if counts.reference == 0:
        return 1.0 if counts.proposed == 0 else 0.0
    return counts.correct / counts.reference


def f_beta(counts: PRCounts, beta: float = 1.0) -> float:
    """Weighted harmonic mean (beta^2+1)PR / (beta^2 P + R) of P and R.

    beta > 1 favors recall, beta < 1 favors precision; beta = 1 weighs them
    equally and makes the measure symmetric in the two span sets.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if counts.proposed == 0 and counts.reference == 0:
        return 1.0
    if counts.correct == 0:
        return 0.0
    p = precision(counts)
    r = recall(counts)
    b2 = beta * beta
    return (b2 + 1.0) * p * r / (b2 * p + r)


@dataclass(frozen=True)
class EvalReport:
    """Micro-averaged corpus score with the pooled counts behind it."""

    precision: float
    recall: float
    fmeasure: float
    counts: PRCounts
    beta: float = 1.0

    def to_text(self) -> str:
        c = self.counts
        return (
            f"precision {self.precision:.6f}\n"
            f"recall {self.recall:.6f}\n"
            f"fmeasure {self.fmeasure:.6f}\n"
            f"correct {c.correct}\n"
            f"proposed {c.proposed}\n"
            f"reference {c.reference}\n"
        )


def report_from_counts(counts: PRCounts, beta: float = 1.0) -> EvalReport:
    return EvalReport(precision(counts), recall(counts), f_beta(counts, beta), counts, beta)


def evaluate_corpus(reference, proposed, beta: float = 1.0) -> EvalReport:
    """Score aligned reference and proposed labelings over a whole corpus."""
    reference = list(reference)
    proposed = list(proposed)
    if len(reference) != len(proposed):
        raise ValueError(f"corpus length mismatch: {len(reference)} vs {len(proposed)}")
    if not reference:
        raise ValueError("empty corpus")
    total = ZERO
    for ref, prop in zip(reference, proposed):
        total = total + pr_counts(ref.spans(), prop.spans())
    return report_from_counts(total, beta)
