"""Turning session logs into labor hours and dollar figures.

Labor time counts serve-to-submit intervals and gaps between rule edits;
the machine's batch-selection time is the annotator's rest break and costs
no labor.  Money is IDC + S0 * AC + T * (LC + MC).

Run:  python demos/06_cost_models.py
"""

from chunklab import CostParams, SessionEvent, labor_time, monetary_cost
from chunklab.costs import DEFAULT_PARAMS

# An annotator handles two 50-sentence batches: 17 minutes each, with a
# 3-minute machine-selection break in between.
log = [
    SessionEvent(0, "batch-served", {"batch": 1}),
    SessionEvent(1020, "annotation-submitted", {"batch": 1}),
    SessionEvent(1200, "batch-served", {"batch": 2}),
    SessionEvent(2220, "annotation-submitted", {"batch": 2}),
]
hours = labor_time(log)
print(f"labor: {hours * 60:.0f} minutes (the 3-minute selection gap is free)")

annotation = DEFAULT_PARAMS["annotation"]
print(f"annotation cost at default rates: ${monetary_cost(annotation, hours):.2f}")

# Rule writing burns cheaper machine cycles but the same labor rate.
rule_writing = DEFAULT_PARAMS["rule-writing"]
print(f"rule-writing cost for the same hours: ${monetary_cost(rule_writing, hours):.2f}")

# With a priced gold seed, fixed costs appear even at zero invested hours.
with_gold = CostParams(infrastructure_cost=150.0, initial_gold_sentences=100,
                       gold_cost_per_sentence=0.10, labor_rate=12.0,
                       machine_rate=0.24)
print(f"fixed costs before any work: ${monetary_cost(with_gold, 0):.2f}")
