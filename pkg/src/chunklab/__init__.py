"""chunklab: an active-learning workbench for base noun-phrase chunking."""

from .corpus import (
    ChunkSpan,
    CorpusError,
    Labeling,
    Sentence,
    Token,
    bracket_parse,
    bracket_render,
    emit_conll,
    iob_to_spans,
    parse_conll,
    spans_to_iob,
)
from .metrics import EvalReport, PRCounts, evaluate_corpus, f_beta, pr_counts
from .tbl import (
    Chunker,
    InitialAnnotator,
    TrainConfig,
    TransformRule,
    apply_chunker,
    apply_chunker_batch,
    deserialize_chunker,
    learn_rules,
    serialize_chunker,
    train_initial,
)
from .active import (
    ALConfig,
    ALHistory,
    OracleAnnotator,
    bagging_split,
    f_complement_sentence,
    nfold_split,
    run_active_learning,
    run_sequential,
    score_pool,
    select_batch,
    vote_entropy_sentence,
)
from .costs import CostParams, SessionEvent, labor_time, learning_curve, monetary_cost
from .ruledsl import (
    DEFAULT_MACROS,
    MacroTable,
    apply_program,
    apply_rule,
    evaluate_program,
    parse_macro_file,
    parse_rule_file,
)
from .session import CorpusBundle, SessionConfig, SessionService, replay, state_hash
from .synth import SynthConfig, generate_corpus

__version__ = "0.1.0"
