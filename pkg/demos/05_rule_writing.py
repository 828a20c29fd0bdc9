"""The human bracketing-rule language: parse, apply, and score a rule list.

Rules place new chunk brackets with { } and anchor on existing ones with
[ ]; token patterns are word_tag regex fragments with ::? ::* ::+
repetition, and uppercase macros expand from a macro table.

Run:  python demos/05_rule_writing.py
"""

from chunklab import parse_rule_file
from chunklab.corpus import Labeling, bracket_parse, bracket_render
from chunklab.ruledsl import apply_rule, evaluate_program

# Three classic moves, one rule each.
examples = [
    ("{ _DT ADJ* NOUN+ }", "The_DT man_NN ran_VBD ._."),
    ("[ { ANYWORD* NOUN+ } { ADJ* TIMEDAY } ]", "( New_NNP York_NNP Friday_NNP )"),
    ("{ about_ [ _$ NUM+ ] }", "about_IN ( $_$ 5_CD )"),
]
for rule_text, before in examples:
    program = parse_rule_file(rule_text).raise_if_errors()
    after = apply_rule(program.rules[0], bracket_parse(before))
    print(f"{rule_text:46} {before}")
    print(f"{'':46} -> {bracket_render(*after)}\n")

# A small program scored against gold chunks: every rule reports the F it
# gained or lost, exactly what the live rule-writing view shows.
gold_texts = [
    "( The_DT man_NN ) ran_VBD ._.",
    "( She_PRP ) bought_VBD ( the_DT old_JJ house_NN ) ._.",
    "( He_PRP ) saw_VBD ( it_PRP ) ._.",
]
gold = []
for text in gold_texts:
    sentence, spans = bracket_parse(text)
    gold.append((sentence, Labeling.from_spans(spans, len(sentence))))

program = parse_rule_file("{ _DT ADJ* NOUN+ }\n{ _PRP }\n").raise_if_errors()
outcome = evaluate_program(program, gold)
for delta in outcome.deltas:
    print(f"rule {delta.index + 1}: {delta.source:24} F after = {delta.f_after:.3f} "
          f"(delta {delta.delta:+.3f})")
print(f"final: P={outcome.report.precision:.3f} R={outcome.report.recall:.3f} "
      f"F={outcome.report.fmeasure:.3f}")
