"""summrank: unsupervised re-ranking of summary candidates.

Scores each candidate in a pool with a simplex-weighted combination of
source-overlap, semantic-similarity, and intrinsic-quality features; the
weights are estimated against pseudo-summaries extracted from the source
documents themselves, so no reference supervision is needed.
"""

__version__ = "0.1.0"

from .corpus import Document, load_corpus, save_corpus
from .errors import (
    ParameterError,
    ProtocolError,
    SummrankError,
    TransportError,
    ValidationError,
)
from .estimate import EstimationConfig, ObjectiveTable, hierarchical_estimate, local_search
from .evaluate import (
    baseline_select,
    evaluate_strategies,
    gain,
    overlap_diagnostics,
    recall_at_k,
    recall_curve,
)
from .features import FeatureMatrix, FeatureSpec, compute_features, normalize
from .metrics import (
    bleu,
    diversity,
    length_score,
    mean_rouge,
    rouge_l,
    rouge_lsum,
    rouge_n,
)
from .pseudo import PseudoTarget, build_pseudo_target, lead3, random3, salient
from .rerank import CoefficientSet, Selection, combine, rerank_corpus, select
from .scoring import IdfTable, ScoreCache, ScorerId, ScorerRegistry, builtin_lexical_score
from .selftrain import build_labels, extractiveness, write_labels
from .synthetic import generate
from .text import (
    SentenceList,
    TokenizerConfig,
    TokenSequence,
    ngrams,
    split_sentences,
    tokenize,
)
