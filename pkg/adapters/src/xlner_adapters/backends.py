"""Translation and word-alignment backends.

A backend turns batches of tokenized sentences into translations, or
batches of sentence pairs into link sets. Two kinds exist:

* deterministic built-ins (`identity`, `reverse`, `position`) that need no
  model files and anchor the contract tests, and
* Hugging Face models, selected by any other identifier and imported
  lazily so the neural stack stays optional.

Load failures of any kind surface as ValueError so callers can treat
"model unavailable" uniformly.
"""

from __future__ import annotations

BUILTIN_TRANSLATORS = ("identity", "reverse")
BUILTIN_ALIGNERS = ("position",)


# ---------------------------------------------------------------------------
# Deterministic built-ins


class IdentityTranslator:
    """Copies every sentence unchanged; a stand-in for pipeline smoke tests."""

    def translate_batch(self, batch):
        return [list(tokens) for tokens in batch]


class ReverseTranslator:
    """Reverses token order; a cheap 'translation' that actually changes text."""

    def translate_batch(self, batch):
        return [list(reversed(tokens)) for tokens in batch]


class PositionalAligner:
    """Links each target token to the proportionally nearest source token.

    Pure integer arithmetic, so results are identical everywhere. On
    equal-length pairs this is the identity alignment.
    """

    def align_batch(self, pairs):
        out = []
        for source, target in pairs:
            n, m = len(source), len(target)
            out.append({(min(n - 1, (j * n) // m), j) for j in range(m)})
        return out


# ---------------------------------------------------------------------------
# Hugging Face backends (imported lazily; any identifier that is not a
# built-in name is handed to transformers as-is)


class Seq2SeqTranslator:
    """Batch inference over a pretrained sequence-to-sequence model."""

    def __init__(self, model: str, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
        except ImportError as exc:
            raise ValueError(
                f"cannot load translation model {model!r}: transformers/torch not installed"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model)
            self._model = AutoModelForSeq2SeqLM.from_pretrained(model).to(device).eval()
        except Exception as exc:
            raise ValueError(f"cannot load translation model {model!r}: {exc}") from exc
        self._torch = torch
        self._device = device

    def translate_batch(self, batch):
        texts = [" ".join(tokens) for tokens in batch]
        encoded = self._tokenizer(
            texts, return_tensors="pt", padding=True, truncation=True
        ).to(self._device)
        with self._torch.no_grad():
            generated = self._model.generate(**encoded)
        decoded = self._tokenizer.batch_decode(generated, skip_special_tokens=True)
        return [text.split() for text in decoded]


class EmbeddingAligner:
    """Word alignment from contextual embeddings.

    Scores every source/target subword pair by dot product, applies a
    softmax in each direction, and keeps pairs that clear `threshold` both
    ways; subword links are then collapsed onto word indices.
    """

    def __init__(self, model: str, device: str = "cpu", threshold: float = 1e-3):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise ValueError(
                f"cannot load alignment model {model!r}: transformers/torch not installed"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model)
            self._model = AutoModel.from_pretrained(model).to(device).eval()
        except Exception as exc:
            raise ValueError(f"cannot load alignment model {model!r}: {exc}") from exc
        self._torch = torch
        self._device = device
        self._threshold = threshold

    def _embed(self, tokens):
        encoded = self._tokenizer(
            list(tokens), is_split_into_words=True, return_tensors="pt", truncation=True
        )
        with self._torch.no_grad():
            states = self._model(**encoded.to(self._device)).last_hidden_state[0]
        return states, encoded.word_ids()

    def align_batch(self, pairs):
        out = []
        for source, target in pairs:
            src_states, src_words = self._embed(source)
            tgt_states, tgt_words = self._embed(target)
            similarity = src_states @ tgt_states.T
            src_to_tgt = similarity.softmax(dim=1)
            tgt_to_src = similarity.softmax(dim=0)
            keep = (src_to_tgt > self._threshold) & (tgt_to_src > self._threshold)
            links = set()
            for a, b in keep.nonzero().tolist():
                if src_words[a] is not None and tgt_words[b] is not None:
                    links.add((src_words[a], tgt_words[b]))
            out.append(links)
        return out


# ---------------------------------------------------------------------------
# Dispatch


def load_translation_backend(model: str, device: str = "cpu"):
    """Resolve a model identifier to a translation backend."""
    if model == "identity":
        return IdentityTranslator()
    if model == "reverse":
        return ReverseTranslator()
    return Seq2SeqTranslator(model, device)


def load_alignment_backend(model: str, device: str = "cpu"):
    """Resolve a model identifier to an alignment backend."""
    if model == "position":
        return PositionalAligner()
    return EmbeddingAligner(model, device)
