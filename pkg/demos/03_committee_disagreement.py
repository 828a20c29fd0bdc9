"""The two committee disagreement measures, computed on one sentence.

Vote entropy looks at per-token tag votes; the f-complement sums one minus
the pairwise chunk F1 between member labelings, so it reacts to whole-chunk
boundary differences rather than token counts.

Run:  python demos/03_committee_disagreement.py
"""

from chunklab import Labeling, f_complement_sentence, vote_entropy_sentence

# Three committee members label "the rising rate fell ." differently.
member_a = Labeling(("I", "I", "I", "O", "O"))   # ( the rising rate ) fell .
member_b = Labeling(("I", "O", "I", "O", "O"))   # ( the ) rising ( rate ) fell .
member_c = Labeling(("I", "I", "I", "O", "O"))   # agrees with member_a

committee = [member_a, member_b, member_c]
print("vote entropy :", round(vote_entropy_sentence(committee), 6))
print("f-complement :", round(f_complement_sentence(committee), 6))

# Full agreement scores zero under both measures.
agreed = [member_a, member_a, member_a]
assert vote_entropy_sentence(agreed) == 0.0
assert f_complement_sentence(agreed) == 0.0

# Maximal disagreement on a single token: every member votes differently.
print("one token, three-way vote:", vote_entropy_sentence([("I",), ("O",), ("B",)]))
