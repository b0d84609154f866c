"""Command-line entry point: one `xlner` binary, one subcommand per pipeline.

Every subcommand is a thin wrapper over the library modules and is fully
deterministic — no RNG, no wall-clock, no network. Exit codes: 0 on
success, 1 for usage errors (bad flags), 2 for data errors (unreadable or
malformed files, mismatched corpora).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .aligner import AlignerConfig, load_model, save_model, train, viterbi_align
from .corpus import (
    parse_conll,
    parse_gold_alignment_file,
    parse_parallel,
    parse_pharaoh_file,
    write_conll,
    write_pharaoh_file,
)
from .metrics import aer, corpus_bleu, label_distribution, ner_prf
from .projection import (
    COLLISION_POLICIES,
    GAP_STRATEGIES,
    UNALIGNED_POLICIES,
    ProjectionConfig,
    back_project_corpus,
    extract_aligned_pairs,
    project_corpus,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; our convention reserves 2 for data
    # errors, so remap usage problems to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class SelectionReport:
    """Candidate systems ranked on a dev-set metric, best first."""

    metric: str
    ranking: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "ranking": [
                {"rank": i + 1, "name": name, "score": score}
                for i, (name, score) in enumerate(self.ranking)
            ],
        }


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    out = Path(path)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")


def _token_lines(text: str) -> list[list[str]]:
    return [line.split() for line in text.splitlines()]


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def _candidate(value: str) -> tuple[str, str]:
    name, sep, path = value.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=FILE, got {value!r}")
    return name, path


def cmd_align_train(args) -> int:
    bitext = parse_parallel(_read(args.src), _read(args.tgt))
    cfg = AlignerConfig(
        iterations=args.iters,
        tension=args.tension,
        null_prob=args.p0,
        smoothing=args.smoothing,
        optimize_tension=args.optimize_tension,
    )
    model = train(bitext, cfg)
    save_model(model, args.out)
    payload = {
        "sentences": len(bitext),
        "source_vocab": len(model.source_vocab),
        "target_vocab": len(model.target_vocab),
        "tension": model.tension,
        "log_likelihood": model.log_likelihoods[-1],
        "model": args.out,
    }
    _emit(
        args,
        payload,
        f"trained on {len(bitext)} sentence pairs "
        f"({len(model.source_vocab)} source / {len(model.target_vocab)} target types), "
        f"final log-likelihood {model.log_likelihoods[-1]:.6f} -> {args.out}",
    )
    return 0


def cmd_align(args) -> int:
    model = load_model(args.model)
    pairs = parse_parallel(_read(args.src), _read(args.tgt))
    alignments = [viterbi_align(model, pair) for pair in pairs]
    _write(args.out, write_pharaoh_file(alignments))
    links = sum(len(a.links) for a in alignments)
    _emit(
        args,
        {"sentences": len(pairs), "links": links, "alignments": args.out},
        f"aligned {len(pairs)} sentence pairs ({links} links) -> {args.out}",
    )
    return 0


def _run_projection(args, operation) -> int:
    labeled = parse_conll(_read(args.conll))
    pairs = parse_parallel(_read(args.src), _read(args.tgt))
    alignments = parse_pharaoh_file(_read(args.align))
    cfg = ProjectionConfig(
        gap_strategy=args.gap_strategy,
        collision_policy=args.collision,
        unaligned_entity_policy=args.unaligned,
    )
    projected, report = operation(labeled, pairs, alignments, cfg)
    _write(args.out, write_conll(projected))
    if args.report:
        _write(args.report, json.dumps(report.to_dict(), sort_keys=True) + "\n")
    stats = report.to_dict()
    human = (
        f"projected {stats['entities_projected']}/{stats['entities_in']} entities "
        f"({stats['entities_dropped_unaligned']} dropped, {stats['entities_split']} split, "
        f"{stats['token_collisions']} token collisions) -> {args.out}"
    )
    _emit(args, {**stats, "output": args.out}, human)
    return 0


def cmd_project(args) -> int:
    return _run_projection(args, project_corpus)


def cmd_backproject(args) -> int:
    return _run_projection(args, back_project_corpus)


def cmd_extract_pairs(args) -> int:
    pairs = parse_parallel(_read(args.src), _read(args.tgt))
    alignments = parse_pharaoh_file(_read(args.align))
    if len(pairs) != len(alignments):
        raise ValueError(
            f"length mismatch: {len(pairs)} sentence pairs vs {len(alignments)} alignments"
        )
    rows = []
    for s, (pair, alignment) in enumerate(zip(pairs, alignments)):
        try:
            for src_tok, tgt_tok in extract_aligned_pairs(pair, alignment):
                rows.append(f"{src_tok.text}\t{tgt_tok.text}\n")
        except ValueError as err:
            raise ValueError(f"sentence {s}: {err}") from err
    _write(args.out, "".join(rows))
    _emit(
        args,
        {"pairs": len(rows), "output": args.out},
        f"extracted {len(rows)} aligned word pairs -> {args.out}",
    )
    return 0


def cmd_eval_ner(args) -> int:
    gold = parse_conll(_read(args.gold))
    pred = parse_conll(_read(args.pred))
    report = ner_prf(gold, pred)
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
        return 0
    lines = [
        f"micro precision {report.micro.precision:.4f} "
        f"recall {report.micro.recall:.4f} f1 {report.micro.f1:.4f} "
        f"({report.micro.match_count}/{report.micro.pred_count} predicted, "
        f"{report.micro.gold_count} gold)",
        f"macro f1 {report.macro_f1:.4f}",
    ]
    if args.per_label:
        for label in sorted(report.per_label):
            s = report.per_label[label]
            lines.append(
                f"{label}: precision {s.precision:.4f} recall {s.recall:.4f} "
                f"f1 {s.f1:.4f} (gold {s.gold_count}, pred {s.pred_count})"
            )
    print("\n".join(lines))
    return 0


def cmd_eval_aer(args) -> int:
    pred = parse_pharaoh_file(_read(args.pred))
    gold = parse_gold_alignment_file(_read(args.gold))
    value = aer(pred, gold)
    _emit(
        args,
        {"aer": value, "sentences": len(pred)},
        f"AER {value:.4f} over {len(pred)} sentences",
    )
    return 0


def cmd_eval_bleu(args) -> int:
    hyps = _token_lines(_read(args.hyp))
    refs = _token_lines(_read(args.ref))
    report = corpus_bleu(hyps, refs, max_n=args.max_n, smooth=args.smooth)
    precisions = " ".join(f"{p:.4f}" for p in report.precisions)
    _emit(
        args,
        report.to_dict(),
        f"BLEU {report.score:.2f} (precisions {precisions}, "
        f"brevity penalty {report.brevity_penalty:.4f}, "
        f"lengths {report.hyp_length}/{report.ref_length})",
    )
    return 0


def cmd_stats(args) -> int:
    corpus = parse_conll(_read(args.conll))
    stats = label_distribution(corpus)
    if args.json:
        print(json.dumps(stats.to_dict(), sort_keys=True))
        return 0
    lines = [f"sentences {stats.sentences}", f"entities {stats.entities}"]
    for label, count in sorted(stats.label_counts.items()):
        lines.append(f"{label} {count}")
    print("\n".join(lines))
    return 0


def cmd_select(args) -> int:
    scores = []
    if args.metric == "bleu":
        refs = _token_lines(_read(args.ref))
        for name, path in args.candidate:
            try:
                scores.append((name, corpus_bleu(_token_lines(_read(path)), refs).score))
            except ValueError as err:
                raise ValueError(f"candidate {name}: {err}") from err
        # higher BLEU first
        ranking = sorted(scores, key=lambda item: (-item[1], item[0]))
    else:
        gold = parse_gold_alignment_file(_read(args.gold))
        for name, path in args.candidate:
            try:
                scores.append((name, aer(parse_pharaoh_file(_read(path)), gold)))
            except ValueError as err:
                raise ValueError(f"candidate {name}: {err}") from err
        # lower AER first
        ranking = sorted(scores, key=lambda item: (item[1], item[0]))
    report = SelectionReport(metric=args.metric, ranking=tuple(ranking))
    if args.out:
        _write(args.out, json.dumps(report.to_dict(), sort_keys=True) + "\n")
    if args.json:
        print(json.dumps(report.to_dict(), sort_keys=True))
    else:
        print(
            "\n".join(
                f"{i + 1}. {name} {args.metric} {score:.4f}"
                for i, (name, score) in enumerate(ranking)
            )
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report on stdout")

    parser = _Parser(prog="xlner", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"xlner {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("align-train", parents=[common], help="train a word-alignment model")
    p.add_argument("--src", required=True, help="source text, one tokenized sentence per line")
    p.add_argument("--tgt", required=True, help="target text, line-aligned with --src")
    p.add_argument("--out", required=True, help="where to write the model file")
    p.add_argument("--iters", type=int, default=5, help="EM iterations (default 5)")
    p.add_argument("--tension", type=float, default=4.0, help="diagonal tension (default 4.0)")
    p.add_argument("--p0", type=float, default=0.08, help="null-alignment probability")
    p.add_argument("--smoothing", type=float, default=0.01, help="additive M-step smoothing")
    p.add_argument(
        "--optimize-tension",
        action="store_true",
        help="retune the tension on training likelihood each EM iteration",
    )
    p.set_defaults(func=cmd_align_train)

    p = sub.add_parser("align", parents=[common], help="align a parallel corpus with a model")
    p.add_argument("--model", required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--out", required=True, help="output alignment file, `i-j` pairs per line")
    p.set_defaults(func=cmd_align)

    for name, descr, func in (
        ("project", "project source-side BIO tags onto the target side", cmd_project),
        (
            "backproject",
            "carry predictions on translations back onto the original text "
            "(--conll/--src hold the predicted side, --tgt the original)",
            cmd_backproject,
        ),
    ):
        p = sub.add_parser(name, parents=[common], help=descr)
        p.add_argument("--conll", required=True, help="BIO tags for the --src side")
        p.add_argument("--src", required=True)
        p.add_argument("--tgt", required=True)
        p.add_argument("--align", required=True, help="source-to-target alignment file")
        p.add_argument("--out", required=True, help="projected CoNLL output")
        p.add_argument("--gap-strategy", choices=GAP_STRATEGIES, default="keep-split")
        p.add_argument("--collision", choices=COLLISION_POLICIES, default="most-links")
        p.add_argument("--unaligned", choices=UNALIGNED_POLICIES, default="drop")
        p.add_argument("--report", help="also write projection counts as JSON")
        p.set_defaults(func=func)

    p = sub.add_parser("extract-pairs", parents=[common], help="dump aligned word pairs as TSV")
    p.add_argument("--src", required=True)
    p.add_argument("--tgt", required=True)
    p.add_argument("--align", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract_pairs)

    p = sub.add_parser("eval-ner", parents=[common], help="entity-level precision/recall/F1")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--per-label", action="store_true", help="also print per-label scores")
    p.set_defaults(func=cmd_eval_ner)

    p = sub.add_parser("eval-aer", parents=[common], help="alignment error rate")
    p.add_argument("--pred", required=True, help="predicted alignments, `i-j` per line")
    p.add_argument("--gold", required=True, help="gold alignments, `i-j` sure / `i?j` possible")
    p.set_defaults(func=cmd_eval_aer)

    p = sub.add_parser("eval-bleu", parents=[common], help="corpus BLEU")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--smooth", action="store_true", help="add-one smoothing above unigrams")
    p.set_defaults(func=cmd_eval_bleu)

    p = sub.add_parser("stats", parents=[common], help="sentence/entity counts of a CoNLL file")
    p.add_argument("--conll", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser(
        "select",
        parents=[common],
        help="rank candidate systems by a dev metric (BLEU or AER)",
    )
    p.add_argument("--metric", choices=("bleu", "aer"), required=True)
    p.add_argument(
        "--candidate",
        action="append",
        type=_candidate,
        required=True,
        metavar="NAME=FILE",
        help="repeatable; hypothesis file for bleu, alignment file for aer",
    )
    p.add_argument("--ref", help="reference text (required with --metric bleu)")
    p.add_argument("--gold", help="gold alignments (required with --metric aer)")
    p.add_argument("--out", help="also write the report as JSON")
    p.set_defaults(func=cmd_select)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "select":
        if args.metric == "bleu" and not args.ref:
            parser.error("--ref is required with --metric bleu")
        if args.metric == "aer" and not args.gold:
            parser.error("--gold is required with --metric aer")
    try:
        return args.func(args)
    except (ValueError, OSError) as err:
        print(f"xlner: error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
