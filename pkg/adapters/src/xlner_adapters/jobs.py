"""File-to-file adapter operations.

Each operation reads plain text files, runs a backend in batches, and
writes one of the core toolkit's formats. Outputs are accumulated in
memory and written in a single pass at the end, so a mid-run failure
leaves no partial file: on any drift the job aborts rather than padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from xlner.corpus import Alignment, parse_parallel, write_pharaoh

from .backends import load_alignment_backend, load_translation_backend


@dataclass(frozen=True)
class AdapterJob:
    """One batch model run: where to read, where to write, what to run."""

    input_path: Path
    output_path: Path
    model: str
    batch_size: int = 16
    device: str = "cpu"

    def __post_init__(self):
        object.__setattr__(self, "input_path", Path(self.input_path))
        object.__setattr__(self, "output_path", Path(self.output_path))
        if not self.input_path.is_file():
            raise ValueError(f"input file not found: {self.input_path}")
        if not self.model:
            raise ValueError("model identifier must be non-empty")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


def _batches(items, size):
    for start in range(0, len(items), size):
        yield items[start : start + size]


def _write_lines(path: Path, lines) -> None:
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def translate_file(job: AdapterJob, backend=None) -> Path:
    """Translate a file of tokenized sentences, one per line.

    The output is line-aligned with the input and whitespace-tokenized, so
    the two files together form a parallel corpus. The input file is never
    touched. A backend that drops, adds, or empties lines aborts the job.
    """
    sentences = []
    for lineno, line in enumerate(
        job.input_path.read_text(encoding="utf-8").splitlines(), 1
    ):
        tokens = line.split()
        if not tokens:
            raise ValueError(f"line {lineno}: empty input sentence")
        sentences.append(tokens)

    if backend is None:
        backend = load_translation_backend(job.model, job.device)
    out_lines = []
    for batch in _batches(sentences, job.batch_size):
        translations = backend.translate_batch(batch)
        if len(translations) != len(batch):
            raise ValueError(
                f"model returned {len(translations)} translations"
                f" for a batch of {len(batch)}"
            )
        out_lines.extend(" ".join(tokens) for tokens in translations)
    for lineno, line in enumerate(out_lines, 1):
        if not line.split():
            raise ValueError(f"line {lineno}: model produced an empty translation")

    _write_lines(job.output_path, out_lines)
    return job.output_path


def align_file(
    source_path,
    target_path,
    model: str,
    output_path,
    *,
    batch_size: int = 16,
    device: str = "cpu",
    backend=None,
) -> Path:
    """Word-align two line-aligned sentence files into a Pharaoh file.

    Inputs are validated as a parallel corpus first, and every link a
    backend emits must be in range for its sentence pair; neither input
    file is modified. One output line per pair, links sorted.
    """
    source_path, target_path = Path(source_path), Path(target_path)
    output_path = Path(output_path)
    for path in (source_path, target_path):
        if not path.is_file():
            raise ValueError(f"input file not found: {path}")
    if not model:
        raise ValueError("model identifier must be non-empty")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")

    pairs = parse_parallel(
        source_path.read_text(encoding="utf-8"),
        target_path.read_text(encoding="utf-8"),
    )
    token_pairs = [
        ([token.text for token in pair.source], [token.text for token in pair.target])
        for pair in pairs
    ]

    if backend is None:
        backend = load_alignment_backend(model, device)
    link_sets = []
    for batch in _batches(token_pairs, batch_size):
        aligned = backend.align_batch(batch)
        if len(aligned) != len(batch):
            raise ValueError(
                f"model returned {len(aligned)} alignments for a batch of {len(batch)}"
            )
        link_sets.extend(aligned)

    lines = []
    for idx, (links, (source, target)) in enumerate(zip(link_sets, token_pairs)):
        alignment = Alignment.of(links)
        try:
            alignment.check_bounds(len(source), len(target))
        except ValueError as err:
            raise ValueError(f"sentence {idx}: {err}") from err
        lines.append(write_pharaoh(alignment))

    _write_lines(output_path, lines)
    return output_path
