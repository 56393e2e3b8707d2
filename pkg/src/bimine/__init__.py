"""bimine: mine parallel sentence pairs from comparable document pairs.

A linear classifier scores every candidate sentence pair of a comparable
document pair; a min-cost monotone alignment picks the best path through
the score matrix; pairs above a confidence threshold are emitted. Includes
parameter tuning, bidirectional mining with merge, a wavefront-parallel
DP engine, BLEU/NIST scoring, and a CLI over all of it.
"""

from .aligner import (
    AlignmentPath,
    MinedPair,
    MiningParams,
    Move,
    SimilarityMatrix,
    build_similarity_matrix,
    extract_pairs,
    nw_align,
    nw_align_wavefront,
    search_align,
)
from .classifier import (
    ClassifierModel,
    FeatureVector,
    confidence,
    extract_features,
    load_model,
    save_model,
    train,
)
from .corpus import (
    Document,
    DocumentPair,
    SeedCorpus,
    Sentence,
    load_document_pairs,
    load_seed_corpus,
    normalize,
    segment_sentences,
    tokenize,
)
from .errors import BimineError, DataError, ResourceLimitError
from .lexicon import Lexicon, coverage, load_lexicon
from .metrics import TestSplit, bleu, nist, sample_test_set
from .miner import (
    MinerConfig,
    MiningReport,
    bidirectional_merge,
    count_unique_tokens,
    mine_corpus,
    mine_document,
)
from .tuner import GoldSet, TuneResult, f_measure, load_gold_set, tune

__version__ = "0.1.0"

__all__ = [
    "AlignmentPath",
    "BimineError",
    "ClassifierModel",
    "DataError",
    "Document",
    "DocumentPair",
    "FeatureVector",
    "GoldSet",
    "Lexicon",
    "MinedPair",
    "MinerConfig",
    "MiningParams",
    "MiningReport",
    "Move",
    "ResourceLimitError",
    "SeedCorpus",
    "Sentence",
    "SimilarityMatrix",
    "TestSplit",
    "TuneResult",
    "__version__",
    "bidirectional_merge",
    "bleu",
    "build_similarity_matrix",
    "confidence",
    "count_unique_tokens",
    "coverage",
    "extract_features",
    "extract_pairs",
    "f_measure",
    "load_document_pairs",
    "load_gold_set",
    "load_lexicon",
    "load_model",
    "load_seed_corpus",
    "mine_corpus",
    "mine_document",
    "nist",
    "normalize",
    "nw_align",
    "nw_align_wavefront",
    "sample_test_set",
    "save_model",
    "search_align",
    "segment_sentences",
    "tokenize",
    "train",
    "tune",
]
