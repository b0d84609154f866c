"""Optional model adapters for the xlner toolkit.

These scripts run translation and word-alignment models and write their
results as the toolkit's plain file formats (line-aligned sentence files,
Pharaoh alignments). The core toolkit stays free of any model dependency:
everything crosses the boundary as files.
"""

from .backends import (
    BUILTIN_ALIGNERS,
    BUILTIN_TRANSLATORS,
    EmbeddingAligner,
    IdentityTranslator,
    PositionalAligner,
    ReverseTranslator,
    Seq2SeqTranslator,
    load_alignment_backend,
    load_translation_backend,
)
from .jobs import AdapterJob, align_file, translate_file

__version__ = "0.1.0"

__all__ = [
    "AdapterJob",
    "BUILTIN_ALIGNERS",
    "BUILTIN_TRANSLATORS",
    "EmbeddingAligner",
    "IdentityTranslator",
    "PositionalAligner",
    "ReverseTranslator",
    "Seq2SeqTranslator",
    "align_file",
    "load_alignment_backend",
    "load_translation_backend",
    "translate_file",
    "__version__",
]
