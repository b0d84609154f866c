"""EM-trained statistical word aligner.

This is the reparameterized IBM Model 2 with a diagonal-favoring prior
(the fast_align family): the probability that target position j of an
(n, m)-length pair aligns to source position i is

    p(a_j = i)    = (1 - p0) * exp(-tension * |(i+1)/n - (j+1)/m|) / Z_j
    p(a_j = NULL) = p0

where Z_j normalizes over source positions. Only the lexical table
t(target_word | source_word) is learned; tension and the null mass are
fixed constants (tension optionally tuned by golden-section search on
training likelihood).

Training is deterministic: sentences are processed in fixed-size chunks
and chunk count tables are merged in chunk order, so the floating-point
reduction order never varies. Alignment is asymmetric source-to-target
(each target word links to at most one source word); no symmetrization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .corpus import Alignment, SentencePair

NULL_WORD = "<NULL>"
PROB_FLOOR = 1e-9

_MODEL_HEADER = "xlner-ttable v1"
_CHUNK = 512
_TENSION_BRACKET = (0.1, 20.0)
_TENSION_STEPS = 10


@dataclass(frozen=True)
class AlignerConfig:
    iterations: int = 5
    tension: float = 4.0
    null_prob: float = 0.08
    smoothing: float = 0.01
    optimize_tension: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.tension <= 0:
            raise ValueError(f"tension must be positive, got {self.tension}")
        if not 0 < self.null_prob < 1:
            raise ValueError(f"null_prob must be in (0, 1), got {self.null_prob}")
        if self.smoothing < 0:
            raise ValueError(f"smoothing must be >= 0, got {self.smoothing}")


@dataclass(frozen=True)
class AlignmentModel:
    """Sparse lexical table plus the diagonal-prior constants.

    ``ttable[source_word][target_word]`` sums to 1 over each row.
    ``log_likelihoods`` holds the corpus log-likelihood at the start of each
    EM iteration (training metadata; not serialized by save_model).
    """

    ttable: dict[str, dict[str, float]]
    tension: float
    null_prob: float
    log_likelihoods: tuple[float, ...] = field(default=())

    @property
    def source_vocab(self) -> frozenset[str]:
        return frozenset(k for k in self.ttable if k != NULL_WORD)

    @property
    def target_vocab(self) -> frozenset[str]:
        return frozenset(f for row in self.ttable.values() for f in row)

    def prob(self, source_word: str, target_word: str) -> float:
        """t(target_word | source_word), with a floor for unseen pairs."""
        return self.ttable.get(source_word, {}).get(target_word, PROB_FLOOR)


def _diagonal_weights(n: int, m: int, tension: float) -> list[list[float]]:
    """Normalized prior weight over source positions, per target position."""
    rows = []
    for j in range(m):
        raw = [math.exp(-tension * abs((i + 1) / n - (j + 1) / m)) for i in range(n)]
        z = math.fsum(raw)
        rows.append([w / z for w in raw])
    return rows


def _posteriors(pair, weights, cfg_null, lookup):
    """Per-target-position posterior over {NULL} + source positions.

    Returns (log-likelihood contribution, list of (j, null_post, src_posts)).
    """
    ll = 0.0
    out = []
    for j, tgt_tok in enumerate(pair.target):
        f = tgt_tok.text
        w_row = weights[j]
        null_score = cfg_null * lookup(NULL_WORD, f)
        src_scores = [
            (1.0 - cfg_null) * w_row[i] * lookup(src_tok.text, f)
            for i, src_tok in enumerate(pair.source)
        ]
        total = null_score + math.fsum(src_scores)
        ll += math.log(total)
        out.append((j, null_score / total, [s / total for s in src_scores]))
    return ll, out


def train(bitext: list[SentencePair], cfg: AlignerConfig = AlignerConfig()) -> AlignmentModel:
    """Run EM for exactly cfg.iterations iterations and return the model.

    The first E-step uses a uniform lexical table (1 / target vocabulary
    size); each M-step renormalizes expected counts with additive smoothing
    over the observed support of every source word.
    """
    if not bitext:
        raise ValueError("bitext is empty")
    for idx, pair in enumerate(bitext):
        if not pair.source or not pair.target:
            raise ValueError(f"pair {idx} has an empty side")
        if any(tok.text == NULL_WORD for tok in pair.source):
            raise ValueError(f"pair {idx}: reserved token {NULL_WORD!r} in source")

    target_vocab_size = len({tok.text for pair in bitext for tok in pair.target})
    uniform = 1.0 / target_vocab_size
    weight_cache: dict[tuple[int, int], list[list[float]]] = {}

    def weights_for(pair):
        key = (len(pair.source), len(pair.target))
        if key not in weight_cache:
            weight_cache[key] = _diagonal_weights(key[0], key[1], tension)
        return weight_cache[key]

    tension = cfg.tension
    ttable: dict[str, dict[str, float]] | None = None
    ll_history: list[float] = []

    for _ in range(cfg.iterations):
        if ttable is None:
            lookup = lambda e, f: uniform  # noqa: E731
        else:
            lookup = lambda e, f: ttable.get(e, {}).get(f, PROB_FLOOR)  # noqa: E731

        # E-step, chunked: per-chunk tables merged in chunk order so the
        # reduction order is fixed regardless of any future parallelism.
        counts: dict[str, dict[str, float]] = {}
        ll = 0.0
        for chunk_start in range(0, len(bitext), _CHUNK):
            chunk_counts: dict[str, dict[str, float]] = {}
            chunk_ll = 0.0
            for pair in bitext[chunk_start : chunk_start + _CHUNK]:
                pair_ll, posts = _posteriors(pair, weights_for(pair), cfg.null_prob, lookup)
                chunk_ll += pair_ll
                for j, null_post, src_posts in posts:
                    f = pair.target[j].text
                    chunk_counts.setdefault(NULL_WORD, {})[f] = (
                        chunk_counts.get(NULL_WORD, {}).get(f, 0.0) + null_post
                    )
                    for i, post in enumerate(src_posts):
                        e = pair.source[i].text
                        row = chunk_counts.setdefault(e, {})
                        row[f] = row.get(f, 0.0) + post
            for e, row in chunk_counts.items():
                dst = counts.setdefault(e, {})
                for f, c in row.items():
                    dst[f] = dst.get(f, 0.0) + c
            ll += chunk_ll
        ll_history.append(ll)

        # M-step: renormalize with additive smoothing over each row's support.
        ttable = {}
        for e, row in counts.items():
            denom = math.fsum(row.values()) + cfg.smoothing * len(row)
            ttable[e] = {f: (c + cfg.smoothing) / denom for f, c in row.items()}

        if cfg.optimize_tension:
            tension = _tune_tension(bitext, ttable, cfg.null_prob)
            weight_cache.clear()

    return AlignmentModel(
        ttable=ttable,
        tension=tension,
        null_prob=cfg.null_prob,
        log_likelihoods=tuple(ll_history),
    )


def corpus_log_likelihood(bitext, model: AlignmentModel) -> float:
    """Log-likelihood of a bitext under a trained model."""
    cache: dict[tuple[int, int], list[list[float]]] = {}
    ll = 0.0
    for pair in bitext:
        key = (len(pair.source), len(pair.target))
        if key not in cache:
            cache[key] = _diagonal_weights(key[0], key[1], model.tension)
        pair_ll, _ = _posteriors(pair, cache[key], model.null_prob, model.prob)
        ll += pair_ll
    return ll


def _tune_tension(bitext, ttable, null_prob) -> float:
    """Golden-section search for the tension maximizing training likelihood."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0

    def ll_at(lam: float) -> float:
        model = AlignmentModel(ttable=ttable, tension=lam, null_prob=null_prob)
        return corpus_log_likelihood(bitext, model)

    lo, hi = _TENSION_BRACKET
    a = hi - inv_phi * (hi - lo)
    b = lo + inv_phi * (hi - lo)
    fa, fb = ll_at(a), ll_at(b)
    for _ in range(_TENSION_STEPS):
        if fa < fb:
            lo, a, fa = a, b, fb
            b = lo + inv_phi * (hi - lo)
            fb = ll_at(b)
        else:
            hi, b, fb = b, a, fa
            a = hi - inv_phi * (hi - lo)
            fa = ll_at(a)
    return (lo + hi) / 2.0


def viterbi_align(model: AlignmentModel, pair: SentencePair) -> Alignment:
    """Best asymmetric alignment: per target word, argmax over NULL + sources.

    A link is emitted only when some source position scores strictly higher
    than the null option; among equal source scores the smallest index wins.
    Words unseen in training fall back to PROB_FLOOR, so alignment is total.
    """
    if not pair.source or not pair.target:
        raise ValueError("pair sides must be non-empty")
    weights = _diagonal_weights(len(pair.source), len(pair.target), model.tension)
    links = set()
    for j, tgt_tok in enumerate(pair.target):
        f = tgt_tok.text
        best_score = model.null_prob * model.prob(NULL_WORD, f)
        best_i = None
        for i, src_tok in enumerate(pair.source):
            score = (1.0 - model.null_prob) * weights[j][i] * model.prob(src_tok.text, f)
            if score > best_score:
                best_score, best_i = score, i
        if best_i is not None:
            links.add((best_i, j))
    return Alignment(frozenset(links))


def save_model(model: AlignmentModel, path) -> None:
    """Write the model as text: a header, then sorted `source target prob` rows."""
    lines = [
        _MODEL_HEADER,
        f"tension {model.tension!r}",
        f"null_prob {model.null_prob!r}",
    ]
    for e in sorted(model.ttable):
        row = model.ttable[e]
        for f in sorted(row):
            lines.append(f"{e} {f} {row[f]!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> AlignmentModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _MODEL_HEADER:
        raise ValueError(f"{path}: not a model file (expected header {_MODEL_HEADER!r})")
    try:
        _, tension = lines[1].split()
        _, null_prob = lines[2].split()
        tension_f, null_prob_f = float(tension), float(null_prob)
    except (IndexError, ValueError) as err:
        raise ValueError(f"{path}: malformed model header") from err
    ttable: dict[str, dict[str, float]] = {}
    for lineno, line in enumerate(lines[3:], 4):
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"{path}: line {lineno}: expected 'source target prob'")
        e, f, prob = fields
        try:
            p = float(prob)
        except ValueError as err:
            raise ValueError(f"{path}: line {lineno}: bad probability {prob!r}") from err
        ttable.setdefault(e, {})[f] = p
    return AlignmentModel(ttable=ttable, tension=tension_f, null_prob=null_prob_f)
