"""Tour of the chunk data model: tags, spans, bracketed text, column files.

Run:  python demos/01_chunk_data_model.py
"""

from chunklab import bracket_parse, bracket_render, emit_conll, iob_to_spans, parse_conll

# A corpus is plain three-column text: word, POS tag, chunk tag.
text = """\
The DT I
man NN I
ran VBD O
. . O

about IN I
$ $ I
5 CD I
a DT B
share NN I
"""

pairs = parse_conll(text)
for sentence, labeling in pairs:
    print("words:", " ".join(sentence.words))
    print("tags: ", " ".join(labeling.tags))
    print("spans:", sorted((s.start, s.end) for s in labeling.spans()))
    print("bracketed:", bracket_render(sentence, labeling.spans()))
    print()

# The B tag marks a chunk starting right after another chunk: "( about $ 5 )
# ( a share )" needs it, since I alone could not separate the two.
sentence, labeling = pairs[1]
assert labeling.tags[3] == "B"

# Every representation converts losslessly into the others.
assert parse_conll(emit_conll(pairs)) == pairs
rendered = bracket_render(sentence, labeling.spans())
reparsed_sentence, reparsed_spans = bracket_parse(rendered)
assert reparsed_spans == labeling.spans()
assert iob_to_spans(labeling.tags) == labeling.spans()
print("round trips: OK")
