"""Drive a live annotation session through the whole protocol, in process.

The same flow works over HTTP (`chunklab serve` plus the browser
workbench); here the service is called directly so the demo runs anywhere.
The oracle plays the human: feedback warm-up, three committee-selected
batches, then the held-out final evaluation, and finally a replay of the
event log proving the state is fully reconstructible.

Run:  python demos/07_live_session.py
"""

from chunklab import CorpusBundle, SessionConfig, SessionService, replay, state_hash
from chunklab.synth import SynthConfig, generate_corpus

train = generate_corpus(SynthConfig(sentences=400, seed=3))
test = generate_corpus(SynthConfig(sentences=150, seed=33))
bundle = CorpusBundle.from_pairs("demo", train, test)
service = SessionService({"demo": bundle})

config = SessionConfig(corpus="demo", seed=7, batch_size=10, iterations=3,
                       feedback_limit=3, final_size=20)
session = service.create_session("annotation", config)
sid = session["id"]
print("session", sid[:8], "starts in phase:", session["phase"])

gold = {s.id: list(lab.tags) for s, lab in train}

# Feedback phase: the gold answer comes back after every sentence.
for i in range(2):
    out = service.feedback_step(sid, tags=["O"] * len(train[i][0]))
    print(f"feedback {i}: missing chunks {out['diff']['missing']}")
service.feedback_step(sid, stop=True)  # comfortable enough; stop early
print("phase now:", service.describe(sid)["phase"])

# Active phase: the committee picks each batch by disagreement.
for _ in range(3):
    batch = service.next_batch(sid)
    labelings = [gold[s["id"]] for s in batch["sentences"]]
    ack = service.submit_annotations(sid, batch["batch"], labelings)
    print(f"batch {batch['batch']}: {batch['size']} sentences -> "
          f"iteration {ack['iteration']}, {ack['annotated_words']} words annotated")

# Final held-out evaluation: 20 consecutive test sentences, seeded draw.
final = service.next_batch(sid)
tgold = {s.id: list(lab.tags) for s, lab in test}
report = service.final_eval(sid, [tgold[s["id"]] for s in final["sentences"]])
print(f"final annotation score vs gold: F = {report['fmeasure']:.3f}")

# Everything above is an event; folding the log rebuilds the exact state.
events = service.events(sid)
assert state_hash(replay(events, {"demo": bundle})) == state_hash(service.state_of(sid))
print(f"replayed {len(events)} events: state hash matches")
