"""Evaluation: entity-level P/R/F1, alignment error rate, corpus BLEU, stats.

Entity matching is exact: a predicted span counts only if its sentence,
label, start, and end all equal a gold span's. A one-token boundary miss
("jour" predicted where "par jour" is gold) is a full error under this
scheme, which is what makes alignment slips visible in the scores.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import Alignment, GoldAlignment, TaggedSentence, decode_bio


@dataclass(frozen=True)
class LabelScore:
    precision: float
    recall: float
    f1: float
    gold_count: int
    pred_count: int
    match_count: int


@dataclass(frozen=True)
class EvalReport:
    per_label: dict[str, LabelScore]
    micro: LabelScore
    macro_f1: float

    def to_dict(self) -> dict:
        def row(s: LabelScore) -> dict:
            return {
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "gold": s.gold_count,
                "pred": s.pred_count,
                "match": s.match_count,
            }

        return {
            "per_label": {label: row(s) for label, s in sorted(self.per_label.items())},
            "micro": row(self.micro),
            "macro_f1": self.macro_f1,
        }


@dataclass(frozen=True)
class BleuReport:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        }


@dataclass(frozen=True)
class CorpusStats:
    sentences: int
    entities: int
    label_counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "sentences": self.sentences,
            "entities": self.entities,
            "labels": dict(sorted(self.label_counts.items())),
        }


def _score(match: int, pred: int, gold: int) -> LabelScore:
    p = match / pred if pred else 0.0
    r = match / gold if gold else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return LabelScore(p, r, f1, gold, pred, match)


def ner_prf(gold: list[TaggedSentence], pred: list[TaggedSentence]) -> EvalReport:
    """Exact-span entity P/R/F1, micro over all labels and macro over gold ones.

    Macro-F1 averages only labels that occur in the gold corpus, so a label
    a system hallucinates (or a tiny test set lacks) cannot zero the mean.
    """
    if len(gold) != len(pred):
        raise ValueError(f"corpus length mismatch: {len(gold)} gold vs {len(pred)} predicted")
    gold_c: Counter[str] = Counter()
    pred_c: Counter[str] = Counter()
    match_c: Counter[str] = Counter()
    for s, (g, p) in enumerate(zip(gold, pred)):
        if len(g.tokens) != len(p.tokens):
            raise ValueError(
                f"sentence {s}: {len(g.tokens)} gold tokens vs {len(p.tokens)} predicted"
            )
        g_set = {(sp.label, sp.start, sp.end) for sp in decode_bio(g.tags)}
        p_set = {(sp.label, sp.start, sp.end) for sp in decode_bio(p.tags)}
        for label, *_ in g_set:
            gold_c[label] += 1
        for label, *_ in p_set:
            pred_c[label] += 1
        for label, *_ in g_set & p_set:
            match_c[label] += 1

    labels = sorted(set(gold_c) | set(pred_c))
    per_label = {lbl: _score(match_c[lbl], pred_c[lbl], gold_c[lbl]) for lbl in labels}
    micro = _score(sum(match_c.values()), sum(pred_c.values()), sum(gold_c.values()))
    gold_labels = [lbl for lbl in labels if gold_c[lbl] > 0]
    macro = (
        math.fsum(per_label[lbl].f1 for lbl in gold_labels) / len(gold_labels)
        if gold_labels
        else 0.0
    )
    return EvalReport(per_label=per_label, micro=micro, macro_f1=macro)


def aer(pred: list[Alignment], gold: list[GoldAlignment]) -> float:
    """Alignment error rate, pooled over the corpus.

    AER = 1 - (|A ∩ S| + |A ∩ P|) / (|A| + |S|) with predicted links A,
    sure gold links S, possible gold links P; 0.0 when the denominator is 0.
    """
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} predicted vs {len(gold)} gold")
    a_total = s_total = a_and_s = a_and_p = 0
    for a, g in zip(pred, gold):
        a_total += len(a.links)
        s_total += len(g.sure)
        a_and_s += len(a.links & g.sure)
        a_and_p += len(a.links & g.possible)
    denom = a_total + s_total
    if denom == 0:
        return 0.0
    return 1.0 - (a_and_s + a_and_p) / denom


def corpus_bleu(hyps, refs, max_n: int = 4, smooth: bool = False) -> BleuReport:
    """Corpus BLEU with clipped n-gram precisions and a brevity penalty.

    Single reference per hypothesis. Unsmoothed by default: any zero n-gram
    precision zeroes the score. With smooth=True, orders above 1 get add-one
    smoothing on both numerator and denominator.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    if len(hyps) != len(refs):
        raise ValueError(f"length mismatch: {len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise ValueError("empty corpus")

    hyp_len = sum(len(h) for h in hyps)
    ref_len = sum(len(r) for r in refs)
    matches = [0] * max_n
    totals = [0] * max_n
    for hyp, ref in zip(hyps, refs):
        for n in range(1, max_n + 1):
            hyp_grams = Counter(tuple(hyp[i : i + n]) for i in range(len(hyp) - n + 1))
            ref_grams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
            matches[n - 1] += sum(min(c, ref_grams[g]) for g, c in hyp_grams.items())
            totals[n - 1] += max(0, len(hyp) - n + 1)

    precisions = []
    for n in range(1, max_n + 1):
        m, t = matches[n - 1], totals[n - 1]
        if smooth and n > 1:
            m, t = m + 1, t + 1
        precisions.append(m / t if t else 0.0)

    if hyp_len == 0:
        bp = 1.0
    elif hyp_len < ref_len:
        bp = math.exp(1.0 - ref_len / hyp_len)
    else:
        bp = 1.0

    if all(p > 0 for p in precisions):
        score = 100.0 * bp * math.exp(math.fsum(math.log(p) for p in precisions) / max_n)
    else:
        score = 0.0
    return BleuReport(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        hyp_length=hyp_len,
        ref_length=ref_len,
    )


def label_distribution(corpus: list[TaggedSentence]) -> CorpusStats:
    """Entity counts per label, counting one entity per B- run."""
    counts: Counter[str] = Counter()
    for sentence in corpus:
        for span in decode_bio(sentence.tags):
            counts[span.label] += 1
    return CorpusStats(
        sentences=len(corpus),
        entities=sum(counts.values()),
        label_counts=dict(sorted(counts.items())),
    )
