"""Annotation projection across word alignments.

Labels cross a sentence pair by token index only: an entity's projected
token set is every target index reachable from its source tokens through
alignment links. The same machinery serves both directions; building
synthetic training data labels the original text and projects onto the
translation, while back-projecting predictions labels the translation and
projects onto the original. Callers choose by what they pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Alignment, EntitySpan, TaggedSentence, decode_bio, encode_bio

GAP_STRATEGIES = ("keep-split", "merge-gaps")
COLLISION_POLICIES = ("most-links", "leftmost-entity", "drop-token")
UNALIGNED_POLICIES = ("drop", "error")


@dataclass(frozen=True)
class ProjectionConfig:
    """How to handle gaps, token collisions, and unaligned entities.

    keep-split keeps a non-contiguous projection as one multi-fragment span;
    merge-gaps replaces it with the single range covering everything in
    between, which can swallow neighbouring tokens and is therefore opt-in.
    """

    gap_strategy: str = "keep-split"
    collision_policy: str = "most-links"
    unaligned_entity_policy: str = "drop"

    def __post_init__(self):
        if self.gap_strategy not in GAP_STRATEGIES:
            raise ValueError(f"gap_strategy must be one of {GAP_STRATEGIES}")
        if self.collision_policy not in COLLISION_POLICIES:
            raise ValueError(f"collision_policy must be one of {COLLISION_POLICIES}")
        if self.unaligned_entity_policy not in UNALIGNED_POLICIES:
            raise ValueError(f"unaligned_entity_policy must be one of {UNALIGNED_POLICIES}")


@dataclass(frozen=True)
class ProjectionReport:
    entities_in: int = 0
    entities_projected: int = 0
    entities_dropped_unaligned: int = 0
    entities_split: int = 0
    token_collisions: int = 0

    def __add__(self, other: "ProjectionReport") -> "ProjectionReport":
        return ProjectionReport(
            self.entities_in + other.entities_in,
            self.entities_projected + other.entities_projected,
            self.entities_dropped_unaligned + other.entities_dropped_unaligned,
            self.entities_split + other.entities_split,
            self.token_collisions + other.token_collisions,
        )

    def to_dict(self) -> dict:
        return {
            "entities_in": self.entities_in,
            "entities_projected": self.entities_projected,
            "entities_dropped_unaligned": self.entities_dropped_unaligned,
            "entities_split": self.entities_split,
            "token_collisions": self.token_collisions,
        }


def _runs(indices: list[int]) -> tuple[tuple[int, int], ...]:
    """Maximal contiguous runs of a sorted index list, as half-open ranges."""
    fragments = []
    run_start = prev = indices[0]
    for i in indices[1:]:
        if i != prev + 1:
            fragments.append((run_start, prev + 1))
            run_start = i
        prev = i
    fragments.append((run_start, prev + 1))
    return tuple(fragments)


def project_spans(
    src_spans: list[EntitySpan],
    alignment: Alignment,
    tgt_len: int,
    cfg: ProjectionConfig = ProjectionConfig(),
) -> tuple[list[EntitySpan], ProjectionReport]:
    """Project entity spans through an alignment onto the target side.

    For each entity, the candidate target set is every j linked from one of
    its source tokens. A target token claimed by several entities is given
    to one of them (or to none) according to cfg.collision_policy before
    spans are formed:

      most-links       the entity with the most links into that token wins,
                       leftmost (by source start) on ties
      leftmost-entity  the leftmost claimant wins outright
      drop-token       nobody gets the token

    Entities with no aligned target token are dropped and counted, or raise,
    per cfg.unaligned_entity_policy. Entities that lose all their tokens to
    collisions are likewise counted as dropped.
    """
    spans = sorted(src_spans, key=lambda s: s.start)
    for prev, cur in zip(spans, spans[1:]):
        if cur.start < prev.end:
            raise ValueError(
                f"source spans overlap: {prev.label}@{prev.fragments} and {cur.label}@{cur.fragments}"
            )

    for i, j in alignment.links:
        if i < 0 or not 0 <= j < tgt_len:
            raise ValueError(f"link {i}-{j} out of range for target length {tgt_len}")

    # Per entity: how many links support each candidate target token.
    support: list[dict[int, int]] = []
    for span in spans:
        src_tokens = set(span.token_indices())
        counts: dict[int, int] = {}
        for i, j in alignment.links:
            if i in src_tokens:
                counts[j] = counts.get(j, 0) + 1
        support.append(counts)

    unaligned = 0
    for k, span in enumerate(spans):
        if not support[k]:
            if cfg.unaligned_entity_policy == "error":
                raise ValueError(f"entity {span.label}@{span.fragments} has no aligned target token")
            unaligned += 1

    claimants: dict[int, list[int]] = {}
    for k, counts in enumerate(support):
        for j in counts:
            claimants.setdefault(j, []).append(k)
    collisions = sum(1 for ks in claimants.values() if len(ks) > 1)

    owner: dict[int, int | None] = {}
    for j, ks in claimants.items():
        if len(ks) == 1:
            owner[j] = ks[0]
        elif cfg.collision_policy == "drop-token":
            owner[j] = None
        elif cfg.collision_policy == "leftmost-entity":
            owner[j] = min(ks, key=lambda k: spans[k].start)
        else:  # most-links
            owner[j] = min(ks, key=lambda k: (-support[k][j], spans[k].start))

    projected: list[EntitySpan] = []
    dropped = unaligned
    split = 0
    for k, span in enumerate(spans):
        tokens = sorted(j for j in support[k] if owner.get(j) == k)
        if not tokens:
            if support[k]:  # had candidates, lost them all to collisions
                dropped += 1
            continue
        fragments = _runs(tokens)
        if len(fragments) > 1:
            split += 1
        if cfg.gap_strategy == "merge-gaps":
            fragments = ((tokens[0], tokens[-1] + 1),)
        projected.append(EntitySpan(span.label, fragments))

    projected.sort(key=lambda s: s.start)
    if cfg.gap_strategy == "keep-split":
        # Each target token has a single owner, so overlap cannot happen.
        seen: set[int] = set()
        for span in projected:
            for idx in span.token_indices():
                assert idx not in seen, f"projected spans overlap at {idx}"
                seen.add(idx)

    report = ProjectionReport(
        entities_in=len(spans),
        entities_projected=len(projected),
        entities_dropped_unaligned=dropped,
        entities_split=split,
        token_collisions=collisions,
    )
    return projected, report


def project_corpus(
    labeled_src: list[TaggedSentence],
    pairs,
    alignments,
    cfg: ProjectionConfig = ProjectionConfig(),
) -> tuple[list[TaggedSentence], ProjectionReport]:
    """Project a labeled corpus sentence-by-sentence onto the paired side.

    The labeled side must match the alignment's source side. Raises with the
    sentence index on any per-sentence failure.
    """
    if not (len(labeled_src) == len(pairs) == len(alignments)):
        raise ValueError(
            f"length mismatch: {len(labeled_src)} labeled sentences, "
            f"{len(pairs)} pairs, {len(alignments)} alignments"
        )
    out = []
    total = ProjectionReport()
    for s, (sentence, pair, alignment) in enumerate(zip(labeled_src, pairs, alignments)):
        if len(pair.source) != len(sentence.tokens):
            raise ValueError(
                f"sentence {s}: pair source has {len(pair.source)} tokens, "
                f"labeled sentence has {len(sentence.tokens)}"
            )
        try:
            alignment.check_bounds(len(pair.source), len(pair.target))
            spans = decode_bio(sentence.tags)
            projected, report = project_spans(spans, alignment, len(pair.target), cfg)
            tags = encode_bio(projected, len(pair.target))
        except ValueError as err:
            raise ValueError(f"sentence {s}: {err}") from err
        out.append(TaggedSentence(pair.target, tuple(tags)))
        total = total + report
    return out, total


def back_project_corpus(
    pred_on_translation: list[TaggedSentence],
    pairs,
    alignments,
    cfg: ProjectionConfig = ProjectionConfig(),
) -> tuple[list[TaggedSentence], ProjectionReport]:
    """Carry predictions made on translations back onto the original text.

    Mechanically identical to project_corpus: the predicted side is the
    alignment's source side, the original-language side its target.
    """
    return project_corpus(pred_on_translation, pairs, alignments, cfg)


def extract_aligned_pairs(pair, alignment: Alignment):
    """Word pairs joined by alignment links, in sorted link order."""
    alignment.check_bounds(len(pair.source), len(pair.target))
    return [(pair.source[i], pair.target[j]) for i, j in sorted(alignment.links)]
