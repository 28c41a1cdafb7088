"""ruqkit: diagnose the generic-response problem in dialog models.

The core diagnostic (RUQ, Relative Utterance Quantity) compares a model's
length-normalized score of each training reference against its score of a
generic response such as "I don't know.", and reports how often the
reference wins. Around it: a self-contained trainable n-gram scorer with
beam decoding, ingestion of external token-logprob score files, entropy
based corpus filtering, word-overlap and embedding evaluation metrics,
lexical diversity, and plot emission.
"""

from .corpus import (
    END_MARKER,
    SEP_MARKER,
    UNK_MARKER,
    DialogPair,
    MultiRefItem,
    load_multiref,
    load_pairs,
    tokenize,
    with_end_marker,
    write_pairs,
)
from .diversity import distinct_n
from .embed_metrics import (
    EmbeddingTable,
    embedding_average,
    greedy_matching,
    load_embeddings,
    vector_extrema,
)
from .entropy_filter import FilterOutcome, UtteranceEntropy, filter_corpus, utterance_entropy
from .errors import DataError, UsageError
from .ngram import NGramModel, beam_decode, load_model, save_model, train
from .overlap_metrics import (
    MetricReport,
    avg_max_sentence_bleu,
    corpus_bleu,
    meteor_lite,
    rouge_l,
    sentence_bleu,
)
from .plotting import emit_plot_csv, emit_plot_svg, render_plot_png
from .ruq import (
    DEFAULT_GENERICS,
    DecodeConfig,
    GenericResponse,
    PlotPoint,
    PlotSeries,
    RuqComparison,
    RuqReport,
    compare_pair,
    comparisons_from_candidates,
    plot_series,
    report_from_comparisons,
    ruq_score,
    score_corpus,
    series_from_candidates,
)
from .scorer import (
    ScoredCandidate,
    ScorerConfig,
    UniformScorer,
    normalized_score,
    read_score_file,
    score_tokens,
    write_score_file,
)

__version__ = "0.1.0"
