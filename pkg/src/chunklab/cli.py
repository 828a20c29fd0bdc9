"""Command-line entry points: train, al-sim, rules-eval, cost-report, synth, serve.

Every run is deterministic under a fixed --seed and embeds its resolved
configuration as '#'-comment lines in whatever it writes, so outputs are
diffable and reproducible.  A flat "key = value" --config file may supply
any flag's value; explicit flags win over the file.

Exit codes: 0 ok, 1 runtime failure, 2 usage or IO/parse errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import costs
from .active import ALConfig, OracleAnnotator, run_active_learning, run_sequential
from .corpus import CorpusError, parse_conll
from .metrics import evaluate_corpus
from .ruledsl import DEFAULT_MACROS, DslError, evaluate_program, parse_macro_file, parse_rule_file
from .synth import SynthConfig, corpus_summary, generate_corpus
from .tbl import TblError, TrainConfig, apply_chunker_batch, learn_rules, serialize_chunker

USAGE_EXIT = 2
RUNTIME_EXIT = 1


def _read(path) -> str:
    return Path(path).read_text("utf-8")


def _load_corpus(path):
    return parse_conll(_read(path))


def _parse_config_file(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args, names):
    """Layer config-file values under explicit flags (flags win)."""
    file_values = {}
    if getattr(args, "config", None):
        file_values = _parse_config_file(_read(args.config))
    out = {}
    for name, (caster, default) in names.items():
        explicit = getattr(args, name, None)
        if explicit is not None:
            out[name] = explicit
        elif name in file_values:
            out[name] = caster(file_values[name])
        else:
            out[name] = default
    return out


def _provenance(command: str, resolved: dict) -> str:
    lines = [f"# chunklab {command}"]
    for key in sorted(resolved):
        lines.append(f"# {key}={resolved[key]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands

def cmd_train(args) -> int:
    resolved = _resolve(args, {
        "threshold": (int, 2),
        "max_rules": (int, 500),
        "seed": (int, 0),
    })
    training = _load_corpus(args.corpus)
    config = TrainConfig(score_threshold=resolved["threshold"], max_rules=resolved["max_rules"])
    chunker = learn_rules(training, config)
    eval_pairs = _load_corpus(args.eval) if args.eval else training
    predicted = apply_chunker_batch(chunker, [s for s, _ in eval_pairs])
    report = evaluate_corpus([lab for _, lab in eval_pairs], predicted)
    text = _provenance("train", {**resolved, "corpus": args.corpus,
                                 "rules": len(chunker.rules)}) + serialize_chunker(chunker)
    Path(args.out).write_text(text, "utf-8")
    sys.stdout.write(report.to_text())
    return 0


def _al_config(resolved) -> ALConfig:
    return ALConfig(
        seed_size=resolved["init_size"],
        batch_size=resolved["batch_size"],
        committee_size=resolved["committee"],
        split=resolved["split"],
        measure=resolved["measure"],
        iterations=resolved["iterations"],
        seed=resolved["seed"],
        tbl=TrainConfig(score_threshold=resolved["threshold"]),
    )


def cmd_al_sim(args) -> int:
    resolved = _resolve(args, {
        "seed": (int, 0),
        "measure": (str, "f-complement"),
        "split": (str, "bagging"),
        "batch_size": (int, 50),
        "init_size": (int, 100),
        "committee": (int, 3),
        "iterations": (int, 10),
        "threshold": (int, 2),
    })
    config = _al_config(resolved)
    corpus = _load_corpus(args.corpus)
    test = _load_corpus(args.test)
    sentences = [s for s, _ in corpus]
    oracle = OracleAnnotator({s.id: lab for s, lab in corpus})
    history = run_active_learning(sentences, config, oracle, test)
    Path(args.out).write_text(history.to_csv(), "utf-8")
    if args.sequential:
        seq = run_sequential(sentences, config, oracle, test)
        seq_path = Path(args.out).with_suffix(".seq.csv")
        seq_path.write_text(seq.to_csv(), "utf-8")
        sys.stdout.write(f"sequential curve: {seq_path}\n")
    sys.stdout.write(f"active-learning curve: {args.out}\n")
    return 0


def cmd_rules_eval(args) -> int:
    macros = parse_macro_file(_read(args.macros)) if args.macros else DEFAULT_MACROS
    parsed = parse_rule_file(_read(args.rules), macros)
    gold = _load_corpus(args.gold)
    for diag in parsed.diagnostics:
        sys.stderr.write(f"{args.rules}:{diag.line}: {diag.message}\n")
    outcome = evaluate_program(parsed.program, gold)
    sys.stdout.write(outcome.report.to_text())
    for delta in outcome.deltas:
        sys.stdout.write(f"rule {delta.index + 1} (line {delta.line}): "
                         f"f={delta.f_after:.6f} delta={delta.delta:+.6f}  {delta.source}\n")
    if args.out:
        lines = [f"{d.index + 1},{d.line},{d.f_after:.6f},{d.delta:+.6f}" for d in outcome.deltas]
        Path(args.out).write_text(
            _provenance("rules-eval", {"rules": args.rules, "gold": args.gold})
            + "rule,line,f_after,delta\n" + "\n".join(lines) + "\n", "utf-8")
    return 0


def cmd_cost_report(args) -> int:
    params = costs.parse_cost_params(_read(args.params)) if args.params \
        else costs.DEFAULT_PARAMS[args.method]
    events = costs.events_from_jsonl(_read(args.events))
    hours = costs.labor_time(events)
    total = costs.monetary_cost(params, hours)
    sys.stdout.write(f"labor_hours {hours:.6f}\n")
    sys.stdout.write(f"monetary_cost {total:.2f}\n")
    sys.stdout.write(f"method {params.method}\n")
    sys.stdout.write(f"note {costs.COST_FORMULA_NOTE}\n")
    if args.gold and args.curve_out:
        gold = _load_corpus(args.gold)
        checkpoints = [(ev.timestamp, ev.payload.get("text", ""))
                       for ev in events if ev.kind == "rule-list-submitted"]

        def evaluator(text):
            return evaluate_program(parse_rule_file(text, DEFAULT_MACROS).program, gold).report

        curve = costs.learning_curve(events, checkpoints, evaluator)
        Path(args.curve_out).write_text(
            _provenance("cost-report", {"events": args.events}) + costs.curve_to_csv(curve),
            "utf-8")
        sys.stdout.write(f"curve: {args.curve_out}\n")
    return 0


def cmd_synth(args) -> int:
    resolved = _resolve(args, {"sentences": (int, 2000), "seed": (int, 0)})
    pairs = generate_corpus(SynthConfig(sentences=resolved["sentences"], seed=resolved["seed"]))
    from .corpus import emit_conll
    Path(args.out).write_text(emit_conll(pairs), "utf-8")
    summary = corpus_summary(pairs)
    sys.stdout.write(f"wrote {summary['sentences']} sentences "
                     f"({summary['tokens']} tokens, {summary['chunks']} chunks) to {args.out}\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app, corpus_from_files
    from .session import SessionService

    bundle = corpus_from_files(args.name, args.train, args.test)
    service = SessionService({args.name: bundle}, log_dir=args.log_dir)
    app = build_app(service, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chunklab",
                                     description="Base noun-phrase chunking workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the transformation-based chunker")
    p.add_argument("corpus", help="training corpus (CoNLL columns)")
    p.add_argument("--eval", help="evaluation corpus; defaults to the training corpus")
    p.add_argument("--out", required=True, help="chunker file to write")
    p.add_argument("--threshold", type=int, help="minimum net error reduction per rule")
    p.add_argument("--max-rules", dest="max_rules", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config", help="key = value config file")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("al-sim", help="oracle-driven active-learning simulation")
    p.add_argument("corpus")
    p.add_argument("test")
    p.add_argument("--out", required=True, help="history CSV to write")
    p.add_argument("--sequential", action="store_true",
                   help="also run sequential annotation and write <out>.seq.csv")
    p.add_argument("--seed", type=int)
    p.add_argument("--measure", choices=["vote-entropy", "f-complement"])
    p.add_argument("--split", choices=["bagging", "nfold"])
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.add_argument("--init-size", dest="init_size", type=int)
    p.add_argument("--committee", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--threshold", type=int)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_al_sim)

    p = sub.add_parser("rules-eval", help="evaluate a bracketing-rule file against gold chunks")
    p.add_argument("rules")
    p.add_argument("gold")
    p.add_argument("--macros", help="macro file overriding the built-in table")
    p.add_argument("--out", help="per-rule delta CSV")
    p.set_defaults(fn=cmd_rules_eval)

    p = sub.add_parser("cost-report", help="labor time and monetary cost from a session log")
    p.add_argument("events", help="session event log (JSONL)")
    p.add_argument("--params", help="cost parameter file")
    p.add_argument("--method", choices=["annotation", "rule-writing"], default="annotation",
                   help="default parameter set when --params is omitted")
    p.add_argument("--gold", help="gold corpus for replaying rule-list checkpoints")
    p.add_argument("--curve-out", dest="curve_out", help="learning-curve CSV")
    p.set_defaults(fn=cmd_cost_report)

    p = sub.add_parser("synth", help="generate the synthetic chunk-grammar corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--sentences", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("serve", help="run the live annotation/rule-writing service")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--name", default="default", help="corpus name")
    p.add_argument("--log-dir", dest="log_dir", default="session-logs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory with the browser workbench build")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, IsADirectoryError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except (CorpusError, DslError, TblError, costs.CostError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return USAGE_EXIT
    except Exception as exc:  # noqa: BLE001 - last-resort runtime failure
        sys.stderr.write(f"runtime error: {exc}\n")
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
