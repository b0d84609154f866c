"""Standalone adapter scripts: `xlner-translate` and `xlner-neural-align`.

Flags mirror AdapterJob. Outputs are exactly the core toolkit's file
formats, so results feed straight into `xlner align`/`xlner project`
pipelines. Exit codes follow the same convention: 0 on success, 1 for
usage errors, 2 for data or model errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .backends import BUILTIN_ALIGNERS, BUILTIN_TRANSLATORS
from .jobs import AdapterJob, align_file, translate_file


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; keep 2 for data/model errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_run_flags(parser, builtins) -> None:
    parser.add_argument(
        "--model",
        required=True,
        help=f"model identifier; built-ins: {', '.join(builtins)};"
        " anything else is loaded as a pretrained model name",
    )
    parser.add_argument("--batch-size", type=int, default=16, metavar="N")
    parser.add_argument("--device", default="cpu")
    parser.add_argument(
        "--json", action="store_true", help="machine-readable report on stdout"
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )


def translate_main(argv=None) -> int:
    parser = _Parser(
        prog="xlner-translate",
        description="Translate a file of tokenized sentences, one per line.",
    )
    parser.add_argument("--in", dest="input", required=True, metavar="FILE")
    parser.add_argument("--out", required=True, metavar="FILE")
    _add_run_flags(parser, BUILTIN_TRANSLATORS)
    args = parser.parse_args(argv)
    try:
        out = translate_file(
            AdapterJob(args.input, args.out, args.model, args.batch_size, args.device)
        )
        lines = len(out.read_text(encoding="utf-8").splitlines())
    except (ValueError, OSError) as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 2
    if args.json:
        payload = {"lines": lines, "model": args.model, "output": str(out)}
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"translated {lines} lines -> {out}")
    return 0


def align_main(argv=None) -> int:
    parser = _Parser(
        prog="xlner-neural-align",
        description="Word-align two line-aligned sentence files into Pharaoh format.",
    )
    parser.add_argument("--src", required=True, metavar="FILE")
    parser.add_argument("--tgt", required=True, metavar="FILE")
    parser.add_argument("--out", required=True, metavar="FILE")
    _add_run_flags(parser, BUILTIN_ALIGNERS)
    args = parser.parse_args(argv)
    try:
        out = align_file(
            args.src,
            args.tgt,
            args.model,
            args.out,
            batch_size=args.batch_size,
            device=args.device,
        )
        rows = out.read_text(encoding="utf-8").splitlines()
    except (ValueError, OSError) as err:
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return 2
    links = sum(len(row.split()) for row in rows)
    if args.json:
        payload = {
            "pairs": len(rows),
            "links": links,
            "model": args.model,
            "output": str(out),
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"aligned {len(rows)} pairs ({links} links) -> {out}")
    return 0
