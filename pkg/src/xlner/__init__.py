"""Cross-lingual NER via word-aligned annotation projection.

Train a translation-table aligner on parallel text, project BIO entity
spans across the alignment links, and score the result (entity P/R/F1,
AER, BLEU). Everything is deterministic: same inputs, same bytes out.
"""

from .aligner import (
    AlignerConfig,
    AlignmentModel,
    corpus_log_likelihood,
    load_model,
    save_model,
    train,
    viterbi_align,
)
from .corpus import (
    DEFAULT_LABELS,
    Alignment,
    EntitySpan,
    GoldAlignment,
    ParseError,
    SentencePair,
    TaggedSentence,
    Token,
    decode_bio,
    encode_bio,
    normalize_bio,
    parse_conll,
    parse_gold_alignment,
    parse_gold_alignment_file,
    parse_jsonl,
    parse_parallel,
    parse_pharaoh,
    parse_pharaoh_file,
    tokens_of,
    write_conll,
    write_pharaoh,
    write_pharaoh_file,
)
from .metrics import (
    BleuReport,
    CorpusStats,
    EvalReport,
    LabelScore,
    aer,
    corpus_bleu,
    label_distribution,
    ner_prf,
)
from .projection import (
    COLLISION_POLICIES,
    GAP_STRATEGIES,
    UNALIGNED_POLICIES,
    ProjectionConfig,
    ProjectionReport,
    back_project_corpus,
    extract_aligned_pairs,
    project_corpus,
    project_spans,
)

__version__ = "0.1.0"

__all__ = [
    "AlignerConfig",
    "Alignment",
    "AlignmentModel",
    "BleuReport",
    "COLLISION_POLICIES",
    "CorpusStats",
    "DEFAULT_LABELS",
    "EntitySpan",
    "EvalReport",
    "GAP_STRATEGIES",
    "GoldAlignment",
    "LabelScore",
    "ParseError",
    "ProjectionConfig",
    "ProjectionReport",
    "SentencePair",
    "TaggedSentence",
    "Token",
    "UNALIGNED_POLICIES",
    "aer",
    "back_project_corpus",
    "corpus_bleu",
    "corpus_log_likelihood",
    "decode_bio",
    "encode_bio",
    "extract_aligned_pairs",
    "label_distribution",
    "load_model",
    "ner_prf",
    "normalize_bio",
    "parse_conll",
    "parse_gold_alignment",
    "parse_gold_alignment_file",
    "parse_jsonl",
    "parse_parallel",
    "parse_pharaoh",
    "parse_pharaoh_file",
    "project_corpus",
    "project_spans",
    "save_model",
    "tokens_of",
    "train",
    "viterbi_align",
    "write_conll",
    "write_pharaoh",
    "write_pharaoh_file",
]
