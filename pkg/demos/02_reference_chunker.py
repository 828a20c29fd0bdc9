"""Train the transformation-based chunker and read its learned rules.

The learner starts from a per-POS majority baseline and greedily appends
the rewrite rule with the largest net error reduction until no rule gains
at least the threshold.

Run:  python demos/02_reference_chunker.py
"""

from chunklab import Chunker, apply_chunker_batch, evaluate_corpus, learn_rules, train_initial
from chunklab.synth import SynthConfig, generate_corpus

train = generate_corpus(SynthConfig(sentences=600, seed=1))
test = generate_corpus(SynthConfig(sentences=200, seed=2))
test_sentences = [s for s, _ in test]
test_gold = [lab for _, lab in test]

baseline = Chunker(train_initial(train))
report = evaluate_corpus(test_gold, apply_chunker_batch(baseline, test_sentences))
print(f"baseline (POS majority only): F = {report.fmeasure:.4f}")

chunker = learn_rules(train)
report = evaluate_corpus(test_gold, apply_chunker_batch(chunker, test_sentences))
print(f"trained ({len(chunker.rules)} rules):  F = {report.fmeasure:.4f}")
print()
print("first ten rules, in application order:")
for rule in chunker.rules[:10]:
    print("  ", rule.serialize())
