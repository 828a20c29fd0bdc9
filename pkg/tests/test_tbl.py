import random

import pytest

from chunklab.corpus import Labeling, Sentence, Token, normalize_iob1, parse_conll
from chunklab.tbl import (
    BOUNDARY,
    DEFAULT_TEMPLATES,
    Chunker,
    InitialAnnotator,
    TblError,
    TrainConfig,
    TransformRule,
    _sweep_rule,
    apply_chunker,
    apply_chunker_batch,
    deserialize_chunker,
    learn_rules,
    serialize_chunker,
    train_initial,
)

WORDS = {
    "DT": ["the", "a", "this"],
    "NN": ["dog", "cat", "man", "rate"],
    "NNS": ["dogs", "rates"],
    "JJ": ["big", "red"],
    "VBD": ["saw", "ran"],
    "VBZ": ["sees", "runs"],
    "IN": ["in", "of"],
    "RB": ["only", "very"],
    "CD": ["5", "42"],
}


def random_corpus(rng, n_sent, max_len=7):
    poses = list(WORDS)
    out = []
    for si in range(n_sent):
        n = rng.randint(2, max_len)
        toks, tags = [], []
        for _ in range(n):
            p = rng.choice(poses)
            toks.append(Token(rng.choice(WORDS[p]), p))
            tags.append(rng.choice("IOB"))
        out.append((Sentence(si, tuple(toks)), Labeling(normalize_iob1(tags))))
    return out


# -- brute-force reference trainer (enumerate over errors, score by applying)

def feature_value(feat, sent, tags, j):
    if not 0 <= j < len(tags):
        return BOUNDARY
    if feat == "word":
        return sent.tokens[j].word
    if feat == "pos":
        return sent.tokens[j].pos
    return tags[j]


def brute_best_rule(corpus, states, golds, templates, threshold):
    candidates = set()
    for (sent, _), tags, gold in zip(corpus, states, golds):
        for i, (cur, want) in enumerate(zip(tags, gold)):
            if cur == want:
                continue
            for tmpl in templates:
                tests = tuple(sorted((f, o, feature_value(f, sent, tags, i + o))
                                     for f, o in tmpl))
                candidates.add(TransformRule(tests, cur, want))
    best = None
    for rule in candidates:
        delta = 0
        for (sent, _), tags, gold in zip(corpus, states, golds):
            swept = list(tags)
            _sweep_rule(rule, sent, swept)
            delta += sum(a != b for a, b in zip(tags, gold))
            delta -= sum(a != b for a, b in zip(swept, gold))
        key = (-delta, rule.serialize())
        if best is None or key < best[0]:
            best = (key, rule, delta)
    if best is None or best[2] < threshold:
        return None
    return best[1], best[2]


def brute_learn(corpus, config):
    initial = train_initial(corpus)
    states = [[initial.tag(t.pos) for t in s.tokens] for s, _ in corpus]
    golds = [list(lab.tags) for _, lab in corpus]
    rules = []
    while len(rules) < config.max_rules:
        found = brute_best_rule(corpus, states, golds, config.templates,
                                config.score_threshold)
        if found is None:
            break
        rule, _ = found
        for (sent, _), tags in zip(corpus, states):
            _sweep_rule(rule, sent, tags)
        rules.append(rule)
    return Chunker(initial, tuple(rules))


class TestInitialAnnotator:
    def test_majority_counting(self):
        corpus = parse_conll(
            "a DT I\nb DT I\nc DT I\nd DT O\n\nx NN B\ny NN I\n")
        annot = train_initial(corpus)
        assert annot.tag("DT") == "I"
        assert annot.tag("NN") == "I"   # B counted as I

    def test_unseen_pos_defaults_to_o(self):
        annot = train_initial(parse_conll("a DT I\n"))
        assert annot.tag("XX") == "O"

    def test_tie_goes_to_i(self):
        annot = train_initial(parse_conll("a DT I\nb NN O\nc DT O\nd NN I\n"))
        assert annot.tag("DT") == "I"
        assert annot.tag("NN") == "I"

    def test_empty_training_rejected(self):
        with pytest.raises(TblError):
            train_initial([])

    def test_values_restricted(self):
        with pytest.raises(TblError):
            InitialAnnotator({"DT": "B"})


class TestTransformRule:
    def test_tests_sorted_canonically(self):
        r = TransformRule((("pos", 0, "NN"), ("chunktag", -1, "I")), "I", "O")
        assert r.serialize() == "chunktag[-1]=I pos[0]=NN : I>O"

    def test_parse_round_trip(self):
        r = TransformRule((("word", 0, "about"), ("pos", 1, "CD")), "O", "I")
        assert TransformRule.parse(r.serialize()) == r

    def test_validation(self):
        with pytest.raises(TblError):
            TransformRule((("pos", 0, "NN"),), "I", "I")
        with pytest.raises(TblError):
            TransformRule((("pos", 4, "NN"),), "I", "O")
        with pytest.raises(TblError):
            TransformRule((), "I", "O")
        with pytest.raises(TblError):
            TransformRule((("color", 0, "red"),), "I", "O")


class TestApplyChunker:
    def test_empty_rule_list_is_initial(self):
        chunker = Chunker(InitialAnnotator({"DT": "I", "VBD": "O"}))
        sent = Sentence(0, (Token("the", "DT"), Token("ran", "VBD")))
        assert apply_chunker(chunker, sent).tags == ("I", "O")

    def test_single_rule_trace(self):
        chunker = Chunker(
            InitialAnnotator({"VBD": "I"}, default="I"),
            (TransformRule((("pos", 0, "VBD"),), "I", "O"),),
        )
        sent = Sentence(0, (Token("dogs", "NNS"), Token("ran", "VBD")))
        assert apply_chunker(chunker, sent).tags == ("I", "O")

    def test_sweep_sees_earlier_rewrites(self):
        # chunktag(-1)=O: I->O cascades left to right through a run of I.
        rule = TransformRule((("chunktag", -1, "O"),), "I", "O")
        sent = Sentence(0, tuple(Token(w, "NN") for w in "abc"))
        tags = ["O", "I", "I"]
        _sweep_rule(rule, sent, tags)
        assert tags == ["O", "O", "O"]

    def test_boundary_value_matches_sentence_edge(self):
        rule = TransformRule((("pos", -1, BOUNDARY),), "I", "O")
        chunker = Chunker(InitialAnnotator({}, default="I"), (rule,))
        sent = Sentence(0, (Token("a", "NN"), Token("b", "NN")))
        assert apply_chunker(chunker, sent).tags == ("O", "I")

    def test_output_is_valid_iob1(self):
        # a rule that writes B after O gets normalized away in the output
        rule = TransformRule((("pos", 0, "NN"),), "I", "B")
        chunker = Chunker(InitialAnnotator({"NN": "I"}), (rule,))
        sent = Sentence(0, (Token("dog", "NN"),))
        assert apply_chunker(chunker, sent).tags == ("I",)

    def test_reapplying_rules_to_own_output_stable_when_actions_disjoint(self):
        # Feeding a chunker's output back through its rule cascade is a
        # fixed point whenever no rule writes a tag that another rule
        # rewrites; with word/pos-only conditions nothing else can change.
        rng = random.Random(11)
        for _ in range(20):
            rules = []
            for _ in range(rng.randint(1, 5)):
                pos = rng.choice(list(WORDS))
                off = rng.choice([-1, 0, 1])
                rules.append(TransformRule((("pos", off, pos),), "I", "O"))
            chunker = Chunker(InitialAnnotator({p: "I" for p in WORDS}),
                              tuple(dict.fromkeys(rules)))
            for sent, _ in random_corpus(rng, 6):
                once = list(apply_chunker(chunker, sent).tags)
                twice = list(once)
                for rule in chunker.rules:
                    _sweep_rule(rule, sent, twice)
                assert normalize_iob1(twice) == tuple(once)

    def test_reapplication_can_move_tags_when_rules_chain(self):
        # The unrestricted form of the law above is false: one rule's output
        # can feed another's trigger on the second pass.
        cond = (("pos", 0, "NN"),)
        chunker = Chunker(
            InitialAnnotator({"NN": "I"}),
            (TransformRule(cond, "O", "B"), TransformRule(cond, "I", "O")),
        )
        sent = Sentence(0, (Token("x", "JJ"), Token("dog", "NN")))
        once = list(apply_chunker(chunker, sent).tags)
        assert once == ["O", "O"]
        twice = list(once)
        for rule in chunker.rules:
            _sweep_rule(rule, sent, twice)
        assert twice != once  # the O from pass one becomes B on pass two

    def test_batch_apply_matches_single(self):
        rng = random.Random(5)
        corpus = random_corpus(rng, 25)
        chunker = learn_rules(corpus, TrainConfig(score_threshold=1, max_rules=40))
        sents = [s for s, _ in corpus]
        assert apply_chunker_batch(chunker, sents) == [apply_chunker(chunker, s) for s in sents]


class TestLearnRules:
    def test_perfect_baseline_learns_nothing(self):
        corpus = parse_conll("the DT I\ndog NN I\nran VBD O\n")
        chunker = learn_rules(corpus)
        assert chunker.rules == ()

    def test_huge_threshold_learns_nothing(self):
        corpus = parse_conll("the DT O\ndog NN I\n\nthe DT O\ncat NN I\n\nthe DT I\n")
        chunker = learn_rules(corpus, TrainConfig(score_threshold=10**9))
        assert chunker.rules == ()

    def test_planted_rule_recovered(self, planted_toy):
        chunker = learn_rules(planted_toy, TrainConfig(score_threshold=2))
        assert chunker.rules[0].serialize() == "pos[-1]=VBZ pos[0]=NN : I>O"

    def test_planted_rule_matches_exhaustive_oracle(self, planted_toy):
        initial = train_initial(planted_toy)
        states = [[initial.tag(t.pos) for t in s.tokens] for s, _ in planted_toy]
        golds = [list(lab.tags) for _, lab in planted_toy]
        rule, score = brute_best_rule(planted_toy, states, golds, DEFAULT_TEMPLATES, 2)
        assert rule.serialize() == "pos[-1]=VBZ pos[0]=NN : I>O"
        assert score == 4

    def test_matches_brute_force_trainer(self):
        config = TrainConfig(score_threshold=1, max_rules=25)
        for seed in range(12):
            corpus = random_corpus(random.Random(seed), random.Random(seed).randint(4, 12))
            assert learn_rules(corpus, config).rules == brute_learn(corpus, config).rules

    def test_error_decreases_by_at_least_threshold(self):
        config = TrainConfig(score_threshold=2, max_rules=50)
        corpus = random_corpus(random.Random(99), 30)
        chunker = learn_rules(corpus, config)
        initial = chunker.initial
        states = [[initial.tag(t.pos) for t in s.tokens] for s, _ in corpus]
        golds = [list(lab.tags) for _, lab in corpus]

        def total_errors():
            return sum(sum(a != b for a, b in zip(tags, gold))
                       for tags, gold in zip(states, golds))

        errors = total_errors()
        for rule in chunker.rules:
            for (sent, _), tags in zip(corpus, states):
                _sweep_rule(rule, sent, tags)
            now = total_errors()
            assert errors - now >= config.score_threshold
            errors = now

    def test_deterministic_retraining(self):
        corpus = random_corpus(random.Random(7), 20)
        a = serialize_chunker(learn_rules(corpus))
        b = serialize_chunker(learn_rules(corpus))
        assert a == b

    def test_empty_training_rejected(self):
        with pytest.raises(TblError):
            learn_rules([])


class TestSerialization:
    def test_round_trip(self):
        corpus = random_corpus(random.Random(3), 15)
        chunker = learn_rules(corpus, TrainConfig(score_threshold=1, max_rules=10))
        text = serialize_chunker(chunker)
        assert deserialize_chunker(text) == chunker
        assert serialize_chunker(deserialize_chunker(text)) == text

    def test_empty_chunker(self):
        chunker = Chunker(InitialAnnotator({"DT": "I"}))
        assert deserialize_chunker(serialize_chunker(chunker)) == chunker

    def test_rule_order_preserved(self):
        rules = (
            TransformRule((("pos", 0, "NN"),), "I", "O"),
            TransformRule((("pos", 0, "NN"),), "O", "I"),
        )
        chunker = Chunker(InitialAnnotator({}), rules)
        assert deserialize_chunker(serialize_chunker(chunker)).rules == rules

    def test_comments_ignored(self):
        text = "# provenance\ndefault O\nDT I\n\npos[0]=VBD : I>O\n"
        chunker = deserialize_chunker(text)
        assert chunker.initial.tag_for_pos == {"DT": "I"}
        assert len(chunker.rules) == 1

    @pytest.mark.parametrize("text", [
        "",
        "DT I\n",
        "default O\nDT\n\n",
        "default O\n\nnot a rule\n",
    ])
    def test_malformed_rejected(self, text):
        with pytest.raises(TblError):
            deserialize_chunker(text)
