"""Labor-time and monetary cost accounting over session event logs.

Labor time counts only intervals where a human is working: from a batch
being served to the matching submission, and between consecutive rule-list
edits.  Machine-side gaps (committee retraining while the annotator rests)
are excluded.

Monetary cost is  IDC + S0 * AC + T * (LC + MC)  where IDC is the shared
infrastructure cost, S0 the number of initial gold sentences, AC the gold
annotation cost per sentence, T the invested hours, LC the hourly labor
rate and MC the hourly machine rate.  The S0 term is a product of the
sentence count and the per-sentence rate, since adding a count to a rate is
not dimensionally meaningful; reports carry a note saying so.  Arithmetic
is done in Decimal so dollar figures come out exact.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from decimal import Decimal

__all__ = [
    "CostError",
    "CostParams",
    "SessionEvent",
    "EVENT_KINDS",
    "COST_FORMULA_NOTE",
    "DEFAULT_PARAMS",
    "monetary_cost",
    "labor_time",
    "learning_curve",
    "CurvePoint",
    "curve_to_csv",
    "parse_cost_params",
    "cost_params_to_text",
    "events_from_jsonl",
]

log = logging.getLogger(__name__)

EVENT_KINDS = (
    "batch-served",
    "annotation-submitted",
    "rule-list-submitted",
    "feedback-viewed",
    "eval-requested",
)

COST_FORMULA_NOTE = (
    "gold-standard term computed as initial_gold_sentences * gold_cost_per_sentence"
)


class CostError(ValueError):
    """Bad cost parameters or a malformed event stream."""


@dataclass(frozen=True)
class CostParams:
    """Dollar rates for one development method (annotation or rule-writing)."""

    infrastructure_cost: float = 0.0      # one-off, shared across methods
    initial_gold_sentences: int = 100
    gold_cost_per_sentence: float = 0.0   # unknown for new domains; default 0
    labor_rate: float = 12.00             # dollars per human hour
    machine_rate: float = 0.24            # dollars per machine hour
    method: str = "annotation"

    def __post_init__(self):
        if min(self.infrastructure_cost, self.initial_gold_sentences,
               self.gold_cost_per_sentence, self.labor_rate, self.machine_rate) < 0:
            raise CostError("cost parameters must be nonnegative")
        if self.method not in ("annotation", "rule-writing"):
            raise CostError(f"unknown method {self.method!r}")


DEFAULT_PARAMS = {
    "annotation": CostParams(machine_rate=0.24, method="annotation"),
    "rule-writing": CostParams(machine_rate=0.12, method="rule-writing"),
}


def monetary_cost(params: CostParams, hours: float) -> float:
    """Total dollars for ``hours`` of invested human time under ``params``."""
    if hours < 0:
        raise CostError("negative time investment")
    d = lambda x: Decimal(str(x))
    total = (
        d(params.infrastructure_cost)
        + d(params.initial_gold_sentences) * d(params.gold_cost_per_sentence)
        + d(hours) * (d(params.labor_rate) + d(params.machine_rate))
    )
    return float(total)


# ---------------------------------------------------------------------------
# event streams

@dataclass(frozen=True)
class SessionEvent:
    """One logged session event; timestamp is seconds since session start."""

    timestamp: float
    kind: str
    payload: dict = field(default_factory=dict)


def _check_ordered(events) -> list[SessionEvent]:
    events = list(events)
    last = None
    for ev in events:
        if last is not None and ev.timestamp < last:
            raise CostError("event timestamps decrease")
        last = ev.timestamp
    return events


def _active_seconds(events, warn: bool = True) -> float:
    total = 0.0
    pending_serve: dict = {}
    last_rule_edit = None
    for ev in events:
        if ev.kind == "batch-served":
            batch = ev.payload.get("batch")
            if warn and batch in pending_serve:
                log.warning("batch %r served twice without a submission", batch)
            pending_serve[batch] = ev.timestamp
        elif ev.kind == "annotation-submitted":
            batch = ev.payload.get("batch")
            served = pending_serve.pop(batch, None)
            if served is None:
                if warn:
                    log.warning("submission for batch %r has no serve event; skipped", batch)
                continue
            total += ev.timestamp - served
        elif ev.kind == "rule-list-submitted":
            if last_rule_edit is not None:
                total += ev.timestamp - last_rule_edit
            last_rule_edit = ev.timestamp
    if warn:
        for batch in pending_serve:
            log.warning("batch %r was served but never submitted", batch)
    return total


def labor_time(events) -> float:
    """Hours of active human work in an event stream.

    Sums served-to-submitted intervals and gaps between consecutive rule
    edits; anything else (selection gaps, machine events) contributes
    nothing.  Unmatched serve/submit events are warned about and skipped.
    """
    return _active_seconds(_check_ordered(events)) / 3600.0


# ---------------------------------------------------------------------------
# learning curves

@dataclass(frozen=True)
class CurvePoint:
    minutes: float
    precision: float
    recall: float
    fmeasure: float


def learning_curve(events, checkpoints, evaluator) -> list[CurvePoint]:
    """Performance as a function of invested labor minutes.

    ``checkpoints`` is a list of (timestamp, model-or-program) pairs taken
    from the log; the time axis is the labor time accumulated up to each
    checkpoint (not wall clock), and ``evaluator`` maps a checkpointed model
    to an EvalReport on the designated test set.
    """
    events = _check_ordered(events)
    points = []
    for ts, model in checkpoints:
        prefix = [ev for ev in events if ev.timestamp <= ts]
        minutes = _active_seconds(prefix, warn=False) / 60.0
        report = evaluator(model)
        points.append(CurvePoint(minutes, report.precision, report.recall, report.fmeasure))
    if any(b.minutes < a.minutes for a, b in zip(points, points[1:])):
        raise CostError("checkpoints out of order")
    return points


def curve_to_csv(points) -> str:
    lines = ["minutes,precision,recall,f"]
    for p in points:
        lines.append(f"{p.minutes:.3f},{p.precision:.6f},{p.recall:.6f},{p.fmeasure:.6f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# external formats

_PARAM_KEYS = {
    "infrastructure_cost": float,
    "initial_gold_sentences": int,
    "gold_cost_per_sentence": float,
    "labor_rate": float,
    "machine_rate": float,
    "method": str,
}


def parse_cost_params(text: str) -> CostParams:
    """Flat "key = value" config file; '#' lines are comments."""
    values: dict = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _PARAM_KEYS:
            raise CostError(f"line {lineno}: expected 'key = value' with a known key")
        try:
            values[key] = _PARAM_KEYS[key](value.strip())
        except ValueError as exc:
            raise CostError(f"line {lineno}: {exc}") from exc
    return CostParams(**values)


def cost_params_to_text(params: CostParams) -> str:
    return (
        f"infrastructure_cost = {params.infrastructure_cost}\n"
        f"initial_gold_sentences = {params.initial_gold_sentences}\n"
        f"gold_cost_per_sentence = {params.gold_cost_per_sentence}\n"
        f"labor_rate = {params.labor_rate}\n"
        f"machine_rate = {params.machine_rate}\n"
        f"method = {params.method}\n"
    )


def events_from_jsonl(text: str) -> list[SessionEvent]:
    """Load a session-service event log export.

    The service logs timestamps as epoch milliseconds; they are rebased to
    seconds since the first event, which is what the cost functions expect.
    """
    events = []
    base = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            ts_ms = obj["ts"]
            kind = obj["kind"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise CostError(f"line {lineno}: bad event record: {exc}") from exc
        if base is None:
            base = ts_ms
        events.append(SessionEvent((ts_ms - base) / 1000.0, kind, obj.get("payload", {})))
    return _check_ordered(events)
