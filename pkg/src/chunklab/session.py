"""Event-sourced sessions for live annotation and rule writing.

A session walks one annotator or rule writer through the workflow: a warm-up
feedback phase on gold sentences (annotation mode), an active phase of
committee-selected batches, and a final held-out evaluation.  Every state
mutation appends exactly one event to the session's log; folding the log
with `replay` rebuilds the identical state, and the on-disk JSONL log is the
only persistence.

Batch selection is deterministic given the session seed and iteration, so a
replayed log always matches what the live service computed.  Committee
retraining for the next batch starts in the background as soon as
annotations arrive; requesting the batch blocks until scoring is done.

Submissions are final: there is no endpoint for revising an earlier batch,
and the event log records each one exactly once.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .active import ALConfig, choose_batch
from .corpus import CorpusError, Labeling, Sentence, emit_conll, normalize_iob1
from .metrics import evaluate_corpus
from .ruledsl import DEFAULT_MACROS, evaluate_program, parse_rule_file
from .tbl import TrainConfig

__all__ = [
    "SessionError",
    "UnknownSession",
    "WrongPhase",
    "CorpusBundle",
    "SessionConfig",
    "SessionState",
    "SessionService",
    "replay",
    "state_hash",
]

GOLD_SEED_SIZE = 100
FINAL_DRAW_KEY = 104729  # arbitrary fixed stream key for the final-eval draw


class SessionError(ValueError):
    """Request rejected: bad state, bad payload, or unknown resource."""


class UnknownSession(SessionError):
    pass


class WrongPhase(SessionError):
    pass


@dataclass(frozen=True)
class CorpusBundle:
    """A named train/test corpus pair the service can host sessions on."""

    name: str
    train: tuple
    test: tuple
    sha256: str

    @classmethod
    def from_pairs(cls, name, train, test) -> "CorpusBundle":
        digest = hashlib.sha256(
            (emit_conll(train) + "\x00" + emit_conll(test)).encode()
        ).hexdigest()
        return cls(name, tuple(train), tuple(test), digest)


@dataclass(frozen=True)
class SessionConfig:
    corpus: str = "default"
    seed: int = 0
    batch_size: int = 50
    iterations: int = 10
    feedback_limit: int = 50
    committee_size: int = 3
    split: str = "bagging"
    measure: str = "f-complement"
    score_threshold: int = 2
    max_rules: int = 500
    final_size: int = 100

    def al_config(self) -> ALConfig:
        return ALConfig(
            seed_size=GOLD_SEED_SIZE,
            batch_size=self.batch_size,
            committee_size=self.committee_size,
            split=self.split,
            measure=self.measure,
            iterations=self.iterations,
            seed=self.seed,
            tbl=TrainConfig(score_threshold=self.score_threshold,
                            max_rules=self.max_rules),
        )


@dataclass
class SessionState:
    """Everything a session knows; rebuilt from the event log alone."""

    session_id: str
    mode: str                      # "annotation" | "rule-writing"
    config: SessionConfig
    phase: str = "feedback"        # feedback -> active -> final-eval -> done
    iteration: int = 0
    feedback_index: int = 0
    batch_counter: int = 0
    pending_batch: dict | None = None      # {"batch", "ids", "ts"}
    annotations: dict = field(default_factory=dict)   # id -> list of tags
    rule_text: str = ""
    rule_submissions: int = 0
    final_ids: list | None = None
    final_report: dict | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = asdict(self.config)
        return d


def state_hash(state: SessionState) -> str:
    blob = json.dumps(state.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# event application (pure state transitions)

def _advance_phase(state: SessionState) -> None:
    order = ("feedback", "active", "final-eval", "done")
    state.phase = order[order.index(state.phase) + 1]


def apply_event(state: SessionState | None, event: dict,
                corpora: dict[str, CorpusBundle]) -> SessionState:
    """Fold one event into the state.  Events carry every nondeterministic
    result (batch ids, final draw), so application never recomputes them."""
    kind = event["kind"]
    payload = event.get("payload", {})
    if kind == "session-created":
        config = SessionConfig(**payload["config"])
        bundle = corpora.get(config.corpus)
        if bundle is None:
            raise SessionError(f"unknown corpus {config.corpus!r}")
        if payload.get("corpus_sha") not in (None, bundle.sha256):
            raise SessionError("corpus content changed since the session log was written")
        mode = payload["mode"]
        phase = "feedback" if mode == "annotation" else "active"
        return SessionState(payload["session_id"], mode, config, phase=phase)
    if state is None:
        raise SessionError("event log does not start with session-created")

    if kind == "feedback-viewed":
        state.feedback_index += 1
        if state.feedback_index >= min(state.config.feedback_limit, GOLD_SEED_SIZE):
            _advance_phase(state)
    elif kind == "feedback-stopped":
        _advance_phase(state)
    elif kind == "batch-served":
        state.batch_counter = payload["batch"]
        state.pending_batch = {"batch": payload["batch"], "ids": list(payload["ids"]),
                               "ts": event["ts"]}
    elif kind == "annotation-submitted":
        for sid, tags in zip(state.pending_batch["ids"], payload["labelings"]):
            state.annotations[int(sid)] = list(tags)
        state.pending_batch = None
        state.iteration += 1
    elif kind == "rule-list-submitted":
        state.rule_text = payload["text"]
        state.rule_submissions += 1
    elif kind == "final-served":
        state.final_ids = list(payload["ids"])
        if state.phase == "active":
            _advance_phase(state)
    elif kind == "final-submitted":
        state.final_report = dict(payload["report"])
        state.phase = "done"
    else:
        raise SessionError(f"unknown event kind {kind!r}")
    return state


def replay(events, corpora: dict[str, CorpusBundle]) -> SessionState:
    """Rebuild a session from its event log."""
    state: SessionState | None = None
    for event in events:
        state = apply_event(state, event, corpora)
    if state is None:
        raise SessionError("empty event log")
    return state


# ---------------------------------------------------------------------------
# the service

def _span_list(spans) -> list[list[int]]:
    return sorted([s.start, s.end] for s in spans)


def _sentence_json(sent: Sentence) -> dict:
    return {"id": sent.id, "tokens": [{"w": t.word, "p": t.pos} for t in sent.tokens]}


def _report_json(report) -> dict:
    return {
        "precision": report.precision,
        "recall": report.recall,
        "fmeasure": report.fmeasure,
        "correct": report.counts.correct,
        "proposed": report.counts.proposed,
        "reference": report.counts.reference,
    }


class SessionService:
    """Hosts concurrent sessions over named corpora.

    Requests within one session are serialized; committee work for different
    sessions shares one bounded worker pool.  All state survives restart via
    the per-session JSONL event logs in ``log_dir``.
    """

    def __init__(self, corpora: dict[str, CorpusBundle], log_dir: str | Path | None = None,
                 clock=time.time, workers: int = 2):
        self.corpora = dict(corpora)
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self._states: dict[str, SessionState] = {}
        self._events: dict[str, list[dict]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._prefetch: dict[str, object] = {}
        if self.log_dir is not None:
            self._load_logs()

    # -- persistence --------------------------------------------------------

    def _load_logs(self) -> None:
        for path in sorted(self.log_dir.glob("*.jsonl")):
            events = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
            if not events:
                continue
            state = replay(events, self.corpora)
            self._states[state.session_id] = state
            self._events[state.session_id] = events
            self._locks[state.session_id] = threading.Lock()

    def _append(self, state: SessionState, kind: str, payload: dict) -> dict:
        event = {"ts": int(self.clock() * 1000), "kind": kind, "payload": payload}
        self._events[state.session_id].append(event)
        if self.log_dir is not None:
            with (self.log_dir / f"{state.session_id}.jsonl").open("a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        return event

    # -- helpers -------------------------------------------------------------

    def _session(self, session_id: str) -> tuple[SessionState, threading.Lock]:
        with self._registry_lock:
            state = self._states.get(session_id)
            if state is None:
                raise UnknownSession(f"no session {session_id!r}")
            return state, self._locks[session_id]

    def _bundle(self, state: SessionState) -> CorpusBundle:
        return self.corpora[state.config.corpus]

    def _gold_seed(self, state: SessionState):
        return self._bundle(state).train[:GOLD_SEED_SIZE]

    def _training_pairs(self, state: SessionState) -> dict:
        pairs = {s.id: (s, lab) for s, lab in self._gold_seed(state)}
        by_id = {s.id: s for s, _ in self._bundle(state).train}
        for sid, tags in state.annotations.items():
            sent = by_id[sid]
            pairs[sid] = (sent, Labeling(normalize_iob1(tags)))
        return pairs

    def _pool_sentences(self, state: SessionState):
        taken = set(state.annotations)
        if state.pending_batch:
            taken |= set(state.pending_batch["ids"])
        seed_ids = {s.id for s, _ in self._gold_seed(state)}
        return [s for s, _ in self._bundle(state).train
                if s.id not in taken and s.id not in seed_ids]

    def _select_ids(self, state: SessionState) -> list[int]:
        pool = self._pool_sentences(state)
        if not pool:
            return []
        config = state.config.al_config()
        rng = np.random.default_rng([state.config.seed, state.iteration + 1])
        return choose_batch(self._training_pairs(state), pool, config, rng)

    def _schedule_prefetch(self, state: SessionState) -> None:
        # Deterministic given (seed, iteration), so using the prefetched result
        # is indistinguishable from computing inline at next_batch time.
        key = (state.session_id, state.iteration)
        self._prefetch[state.session_id] = (key, self._pool.submit(self._select_ids, state))

    # -- operations ----------------------------------------------------------

    def create_session(self, mode: str, config: SessionConfig | dict | None = None) -> dict:
        if mode not in ("annotation", "rule-writing"):
            raise SessionError(f"unknown mode {mode!r}")
        if isinstance(config, dict):
            try:
                config = SessionConfig(**config)
            except TypeError as exc:
                raise SessionError(f"bad config: {exc}") from exc
        config = config or SessionConfig()
        if config.corpus not in self.corpora:
            raise SessionError(f"unknown corpus {config.corpus!r}")
        bundle = self.corpora[config.corpus]
        if len(bundle.train) <= GOLD_SEED_SIZE:
            raise SessionError("corpus too small: need more than the gold seed")
        session_id = uuid.uuid4().hex
        event = {
            "ts": int(self.clock() * 1000),
            "kind": "session-created",
            "payload": {
                "session_id": session_id,
                "mode": mode,
                "config": asdict(config),
                "corpus_sha": bundle.sha256,
            },
        }
        state = apply_event(None, event, self.corpora)
        with self._registry_lock:
            self._states[session_id] = state
            self._events[session_id] = []
            self._locks[session_id] = threading.Lock()
        self._events[session_id].append(event)
        if self.log_dir is not None:
            with (self.log_dir / f"{session_id}.jsonl").open("a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
        return self.describe(session_id)

    def describe(self, session_id: str) -> dict:
        state, _ = self._session(session_id)
        words = sum(len(tags) for tags in state.annotations.values())
        return {
            "id": state.session_id,
            "mode": state.mode,
            "phase": state.phase,
            "iteration": state.iteration,
            "feedback_index": state.feedback_index,
            "pending_batch": None if state.pending_batch is None else {
                "batch": state.pending_batch["batch"],
                "size": len(state.pending_batch["ids"]),
            },
            "annotated_sentences": len(state.annotations),
            "annotated_words": words,
            "rule_submissions": state.rule_submissions,
        }

    def feedback_step(self, session_id: str, tags=None, stop: bool = False) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.mode != "annotation" or state.phase != "feedback":
                raise WrongPhase("session is not in the feedback phase")
            if stop:
                self._append(state, "feedback-stopped", {"index": state.feedback_index})
                apply_event(state, self._events[session_id][-1], self.corpora)
                return {"phase": state.phase}
            sent, gold = self._gold_seed(state)[state.feedback_index]
            if tags is None:
                raise SessionError("feedback needs tags or stop")
            submitted = self._validate_labeling(sent, tags)
            diff = {
                "missing": _span_list(gold.spans() - submitted.spans()),
                "extra": _span_list(submitted.spans() - gold.spans()),
            }
            event = self._append(state, "feedback-viewed",
                                 {"index": state.feedback_index, "id": sent.id,
                                  "tags": list(submitted.tags)})
            apply_event(state, event, self.corpora)
            out = {"id": sent.id, "gold": list(gold.tags), "diff": diff, "phase": state.phase}
            if state.phase == "feedback":
                nxt = self._gold_seed(state)[state.feedback_index][0]
                out["next"] = _sentence_json(nxt)
            return out

    def next_batch(self, session_id: str) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.mode != "annotation":
                raise WrongPhase("rule-writing sessions have no annotation batches")
            if state.phase == "final-eval":
                return self._final_batch(state)
            if state.phase != "active":
                raise WrongPhase(f"no batch in phase {state.phase!r}")
            if state.pending_batch is not None:
                raise SessionError("a batch is already pending; submit it first")
            if state.iteration >= state.config.iterations:
                return self._enter_final(state)
            prefetched = self._prefetch.pop(session_id, None)
            ids = None
            if prefetched is not None:
                key, future = prefetched
                if key == (session_id, state.iteration):
                    ids = future.result()
            if ids is None:
                ids = self._select_ids(state)
            if not ids:
                return self._enter_final(state)
            event = self._append(state, "batch-served",
                                 {"batch": state.batch_counter + 1, "ids": ids})
            apply_event(state, event, self.corpora)
            by_id = {s.id: s for s, _ in self._bundle(state).train}
            return {
                "batch": state.pending_batch["batch"],
                "size": len(ids),
                "sentences": [_sentence_json(by_id[i]) for i in ids],
            }

    def submit_annotations(self, session_id: str, batch: int, labelings) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.phase != "active" or state.pending_batch is None:
                raise WrongPhase("no pending batch to submit")
            if batch != state.pending_batch["batch"]:
                raise SessionError(f"batch mismatch: pending {state.pending_batch['batch']}, got {batch}")
            ids = state.pending_batch["ids"]
            if len(labelings) != len(ids):
                raise SessionError(f"expected {len(ids)} labelings, got {len(labelings)}")
            by_id = {s.id: s for s, _ in self._bundle(state).train}
            validated = [list(self._validate_labeling(by_id[i], tags).tags)
                         for i, tags in zip(ids, labelings)]
            served_ts = state.pending_batch["ts"]
            event = self._append(state, "annotation-submitted",
                                 {"batch": batch, "labelings": validated})
            apply_event(state, event, self.corpora)
            if state.iteration < state.config.iterations and self._pool_sentences(state):
                self._schedule_prefetch(state)
            return {
                "iteration": state.iteration,
                "annotated_sentences": len(state.annotations),
                "annotated_words": sum(len(t) for t in state.annotations.values()),
                "duration_seconds": (event["ts"] - served_ts) / 1000.0,
            }

    def submit_rules(self, session_id: str, text: str) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.mode != "rule-writing":
                raise WrongPhase("not a rule-writing session")
            event = self._append(state, "rule-list-submitted", {"text": text})
            apply_event(state, event, self.corpora)
            return self._evaluate_rules(state, text)

    def _evaluate_rules(self, state: SessionState, text: str) -> dict:
        parsed = parse_rule_file(text, DEFAULT_MACROS)
        outcome = evaluate_program(parsed.program, self._gold_seed(state))
        return {
            "diagnostics": [{"line": d.line, "message": d.message} for d in parsed.diagnostics],
            "rules_parsed": len(parsed.program.rules),
            "report": _report_json(outcome.report),
            "deltas": [
                {"index": d.index, "line": d.line, "rule": d.source,
                 "f_after": d.f_after, "delta": d.delta}
                for d in outcome.deltas
            ],
        }

    def _enter_final(self, state: SessionState) -> dict:
        test = self._bundle(state).test
        size = min(state.config.final_size, len(test))
        rng = np.random.default_rng([state.config.seed, FINAL_DRAW_KEY])
        start = int(rng.integers(0, len(test) - size + 1))
        ids = [s.id for s, _ in test[start:start + size]]
        event = self._append(state, "final-served", {"ids": ids})
        apply_event(state, event, self.corpora)
        return self._final_batch(state)

    def _final_batch(self, state: SessionState) -> dict:
        if state.final_ids is None:
            return self._enter_final(state)
        by_id = {s.id: s for s, _ in self._bundle(state).test}
        return {
            "batch": "final",
            "size": len(state.final_ids),
            "sentences": [_sentence_json(by_id[i]) for i in state.final_ids],
        }

    def final_eval(self, session_id: str, labelings) -> dict:
        state, lock = self._session(session_id)
        with lock:
            if state.phase != "final-eval":
                raise WrongPhase(f"final evaluation not open in phase {state.phase!r}")
            ids = state.final_ids
            if len(labelings) != len(ids):
                raise SessionError(f"expected {len(ids)} labelings, got {len(labelings)}")
            test = {s.id: (s, lab) for s, lab in self._bundle(state).test}
            submitted = []
            gold = []
            for i, tags in zip(ids, labelings):
                sent, gold_lab = test[i]
                submitted.append(self._validate_labeling(sent, tags))
                gold.append(gold_lab)
            report = evaluate_corpus(gold, submitted)
            payload = _report_json(report)
            event = self._append(state, "final-submitted", {"report": payload})
            apply_event(state, event, self.corpora)
            return payload

    def reference(self, session_id: str) -> dict:
        state, _ = self._session(session_id)
        out = []
        for sent, lab in self._gold_seed(state):
            item = _sentence_json(sent)
            item["tags"] = list(lab.tags)
            out.append(item)
        return {"sentences": out}

    def events(self, session_id: str) -> list[dict]:
        self._session(session_id)
        return list(self._events[session_id])

    def state_of(self, session_id: str) -> SessionState:
        return self._session(session_id)[0]

    @staticmethod
    def _validate_labeling(sent: Sentence, tags) -> Labeling:
        if not isinstance(tags, (list, tuple)) or len(tags) != len(sent):
            raise SessionError(
                f"sentence {sent.id}: expected {len(sent)} tags, got {len(tags) if isinstance(tags, (list, tuple)) else type(tags).__name__}")
        try:
            return Labeling(normalize_iob1(tags))
        except CorpusError as exc:
            raise SessionError(f"sentence {sent.id}: {exc}") from exc
