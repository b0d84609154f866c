"""Corpus I/O: BIO-tagged corpora, parallel text, word alignments.

Everything here is a pure function over strings or immutable values, so
files can be parsed concurrently without locking. Tokenization is
whitespace splitting only; this module never re-tokenizes, because token
indices are the join key for every alignment-based operation downstream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

# Clinical medication label scheme used by the bundled test data. The label
# vocabulary is otherwise open: any ASCII label parses.
DEFAULT_LABELS = ("DRUG", "STRENGTH", "FREQUENCY", "DURATION", "DOSAGE", "FORM")

_TAG_RE = re.compile(r"^(O|[BI]-([\x21-\x7e]+))$")
_LINK_RE = re.compile(r"^(\d+)([-?])(\d+)$")


class ParseError(ValueError):
    """Malformed on-disk data. Messages carry a 1-based line number."""


@dataclass(frozen=True)
class Token:
    """A single whitespace-delimited token and its 0-based sentence position."""

    text: str
    index: int

    def __post_init__(self):
        if not self.text or any(c.isspace() for c in self.text):
            raise ValueError(f"token text must be non-empty and whitespace-free: {self.text!r}")
        if self.index < 0:
            raise ValueError(f"token index must be >= 0: {self.index}")


@dataclass(frozen=True)
class EntitySpan:
    """A labeled entity as half-open token ranges.

    ``fragments`` is normally a single range; annotation projection can
    produce several disjoint ranges when the aligned target words are not
    contiguous. Fragments are sorted, non-overlapping, and all non-empty.
    """

    label: str
    fragments: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.label:
            raise ValueError("entity label must be non-empty")
        if not self.fragments:
            raise ValueError("entity span needs at least one fragment")
        prev_end = None
        for start, end in self.fragments:
            if start < 0 or start >= end:
                raise ValueError(f"bad fragment [{start}, {end})")
            if prev_end is not None and start < prev_end:
                raise ValueError(f"fragments overlap or are unsorted at [{start}, {end})")
            prev_end = end

    @property
    def start(self) -> int:
        return self.fragments[0][0]

    @property
    def end(self) -> int:
        return self.fragments[-1][1]

    def token_indices(self) -> tuple[int, ...]:
        return tuple(i for s, e in self.fragments for i in range(s, e))


@dataclass(frozen=True)
class TaggedSentence:
    """Tokens plus one BIO tag per token."""

    tokens: tuple[Token, ...]
    tags: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.tags):
            raise ValueError(
                f"{len(self.tokens)} tokens but {len(self.tags)} tags"
            )

    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)


@dataclass(frozen=True)
class SentencePair:
    """A sentence and its translation, both pre-tokenized."""

    source: tuple[Token, ...]
    target: tuple[Token, ...]

    def __post_init__(self):
        if not self.source or not self.target:
            raise ValueError("sentence pair sides must be non-empty")


@dataclass(frozen=True)
class Alignment:
    """A set of (source index, target index) word-alignment links."""

    links: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, pairs) -> "Alignment":
        return cls(frozenset((int(i), int(j)) for i, j in pairs))

    def check_bounds(self, n_source: int, n_target: int) -> None:
        for i, j in self.links:
            if not (0 <= i < n_source and 0 <= j < n_target):
                raise ValueError(
                    f"link {i}-{j} out of range for lengths ({n_source}, {n_target})"
                )


@dataclass(frozen=True)
class GoldAlignment:
    """Gold alignment with sure links S and possible links P, S being a subset of P."""

    sure: frozenset[tuple[int, int]]
    possible: frozenset[tuple[int, int]]

    def __post_init__(self):
        if not self.sure <= self.possible:
            raise ValueError("sure links must be a subset of possible links")


def tokens_of(texts) -> tuple[Token, ...]:
    """Build indexed tokens from an iterable of token strings."""
    return tuple(Token(text, i) for i, text in enumerate(texts))


# ---------------------------------------------------------------------------
# CoNLL (token<TAB>tag, blank line between sentences)


def _check_tag(tag: str, lineno: int) -> str:
    if not _TAG_RE.match(tag):
        raise ParseError(f"line {lineno}: invalid BIO tag {tag!r}")
    return tag


def parse_conll(text: str) -> list[TaggedSentence]:
    """Parse a CoNLL-style corpus from `token<TAB>tag` lines.

    Blank lines separate sentences; a trailing blank line is optional.
    Raises ParseError with the offending line number on malformed rows.
    """
    sentences: list[TaggedSentence] = []
    texts: list[str] = []
    tags: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            if texts:
                sentences.append(TaggedSentence(tokens_of(texts), tuple(tags)))
                texts, tags = [], []
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError(
                f"line {lineno}: expected 'token<TAB>tag', got {len(fields)} fields"
            )
        token, tag = fields
        if not token or any(c.isspace() for c in token):
            raise ParseError(f"line {lineno}: bad token {token!r}")
        texts.append(token)
        tags.append(_check_tag(tag, lineno))
    if texts:
        sentences.append(TaggedSentence(tokens_of(texts), tuple(tags)))
    return sentences


def write_conll(corpus) -> str:
    """Serialize a corpus so that parse_conll(write_conll(c)) == c."""
    blocks = []
    for sentence in corpus:
        rows = "\n".join(f"{tok.text}\t{tag}" for tok, tag in zip(sentence.tokens, sentence.tags))
        blocks.append(rows + "\n\n")
    return "".join(blocks)


def parse_jsonl(text: str) -> list[TaggedSentence]:
    """Parse a JSONL corpus: one {"tokens": [...], "tags": [...]} object per line."""
    sentences = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise ParseError(f"line {lineno}: invalid JSON: {err}") from err
        if not isinstance(obj, dict) or "tokens" not in obj or "tags" not in obj:
            raise ParseError(f"line {lineno}: expected an object with 'tokens' and 'tags'")
        toks, tags = obj["tokens"], obj["tags"]
        if not isinstance(toks, list) or not isinstance(tags, list):
            raise ParseError(f"line {lineno}: 'tokens' and 'tags' must be arrays")
        if len(toks) != len(tags):
            raise ParseError(
                f"line {lineno}: {len(toks)} tokens but {len(tags)} tags"
            )
        for tag in tags:
            if not isinstance(tag, str):
                raise ParseError(f"line {lineno}: non-string tag {tag!r}")
            _check_tag(tag, lineno)
        for tok in toks:
            if not isinstance(tok, str) or not tok or any(c.isspace() for c in tok):
                raise ParseError(f"line {lineno}: bad token {tok!r}")
        sentences.append(TaggedSentence(tokens_of(toks), tuple(tags)))
    return sentences


# ---------------------------------------------------------------------------
# Parallel text (two line-aligned files, one tokenized sentence per line)


def parse_parallel(src_text: str, tgt_text: str) -> list[SentencePair]:
    """Pair up two line-aligned files of whitespace-tokenized sentences."""
    src_lines = src_text.splitlines()
    tgt_lines = tgt_text.splitlines()
    if len(src_lines) != len(tgt_lines):
        raise ParseError(
            f"line count mismatch: {len(src_lines)} source vs {len(tgt_lines)} target"
        )
    pairs = []
    for lineno, (src, tgt) in enumerate(zip(src_lines, tgt_lines), 1):
        src_toks = src.split()
        tgt_toks = tgt.split()
        if not src_toks:
            raise ParseError(f"line {lineno}: empty source sentence")
        if not tgt_toks:
            raise ParseError(f"line {lineno}: empty target sentence")
        pairs.append(SentencePair(tokens_of(src_toks), tokens_of(tgt_toks)))
    return pairs


# ---------------------------------------------------------------------------
# Pharaoh alignments ("i-j" pairs; gold files additionally allow "i?j")


def parse_pharaoh(line: str) -> Alignment:
    """Parse one Pharaoh line ("0-0 1-2") into a link set; duplicates collapse."""
    links = set()
    for field_ in line.split():
        m = _LINK_RE.match(field_)
        if not m or m.group(2) != "-":
            raise ParseError(f"bad alignment link {field_!r}")
        links.add((int(m.group(1)), int(m.group(3))))
    return Alignment(frozenset(links))


def write_pharaoh(alignment: Alignment) -> str:
    """Canonical Pharaoh line: links sorted, space-separated."""
    return " ".join(f"{i}-{j}" for i, j in sorted(alignment.links))


def parse_gold_alignment(line: str) -> GoldAlignment:
    """Parse a gold line where "i-j" is a sure link and "i?j" possible-only."""
    sure = set()
    possible = set()
    for field_ in line.split():
        m = _LINK_RE.match(field_)
        if not m:
            raise ParseError(f"bad alignment link {field_!r}")
        link = (int(m.group(1)), int(m.group(3)))
        possible.add(link)
        if m.group(2) == "-":
            sure.add(link)
    return GoldAlignment(frozenset(sure), frozenset(possible))


def parse_pharaoh_file(text: str) -> list[Alignment]:
    """One alignment per line; an empty line is an (allowed) empty alignment."""
    return [parse_pharaoh(line) for line in text.splitlines()]


def write_pharaoh_file(alignments) -> str:
    return "".join(write_pharaoh(a) + "\n" for a in alignments)


def parse_gold_alignment_file(text: str) -> list[GoldAlignment]:
    return [parse_gold_alignment(line) for line in text.splitlines()]


# ---------------------------------------------------------------------------
# BIO codec


def _split_tag(tag: str) -> tuple[str, str | None]:
    m = _TAG_RE.match(tag)
    if not m:
        raise ValueError(f"invalid BIO tag {tag!r}")
    if tag == "O":
        return "O", None
    return tag[0], m.group(2)


def decode_bio(tags) -> list[EntitySpan]:
    """Decode BIO tags into single-fragment entity spans.

    Decoding is loose: an I-X without a valid predecessor (sentence start,
    after O, or after a different label) opens a new span, exactly as if it
    were B-X. Machine-produced corpora routinely contain such sequences.
    """
    spans: list[EntitySpan] = []
    start = None
    label = None

    def close(end: int):
        nonlocal start, label
        if start is not None:
            spans.append(EntitySpan(label, ((start, end),)))
        start, label = None, None

    for i, tag in enumerate(tags):
        prefix, tag_label = _split_tag(tag)
        if prefix == "O":
            close(i)
        elif prefix == "B" or label != tag_label:
            close(i)
            start, label = i, tag_label
    close(len(tags))
    return spans


def normalize_bio(tags) -> list[str]:
    """Rewrite orphan I-X tags to B-X (the normal form decode_bio assumes)."""
    out: list[str] = []
    prev_label = None
    for tag in tags:
        prefix, label = _split_tag(tag)
        if prefix == "I" and prev_label != label:
            out.append(f"B-{label}")
        else:
            out.append(tag)
        prev_label = label
    return out


def encode_bio(spans, length: int) -> list[str]:
    """Encode entity spans as BIO tags over ``length`` tokens.

    Every fragment becomes its own B-/I- run, so disjoint spans survive the
    trip at the cost of decoding back into one span per fragment. Raises
    ValueError if two spans claim the same token or an index is out of range.
    """
    tags = ["O"] * length
    claimed: set[int] = set()
    for span in spans:
        for frag_start, frag_end in span.fragments:
            if frag_end > length:
                raise ValueError(
                    f"fragment [{frag_start}, {frag_end}) exceeds sentence length {length}"
                )
            for i in range(frag_start, frag_end):
                if i in claimed:
                    raise ValueError(f"overlapping spans at token {i}")
                claimed.add(i)
                tags[i] = ("B-" if i == frag_start else "I-") + span.label
    return tags
