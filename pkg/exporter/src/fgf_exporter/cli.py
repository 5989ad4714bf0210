"""Command line entry point.

    fgf-export export --records <path> --fields <list> --out <dir>

Exit codes: 0 ok, 2 usage, 3 input data, 4 encoder setup or runtime.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .errors import ExportError, InputError, SetupError
from .job import DEFAULT_PHRASE_MODEL, DEFAULT_SENTENCE_MODEL, ExportJob, run_export
from .records import TEXT_FIELDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fgf-export",
        description="Export phrase and sentence embedding files from failure records.",
    )
    sub = parser.add_subparsers(dest="command", metavar="<command>")
    exp = sub.add_parser("export", help="encode record text fields to .vec files")
    exp.add_argument("--records", required=True, help="records CSV or JSONL file")
    exp.add_argument(
        "--fields",
        default=",".join(TEXT_FIELDS),
        help=f"comma-separated record fields (default: all of {', '.join(TEXT_FIELDS)})",
    )
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument(
        "--backend",
        choices=("transformer", "hash"),
        default="transformer",
        help="encoder family (default: transformer)",
    )
    exp.add_argument(
        "--phrase-model",
        default=DEFAULT_PHRASE_MODEL,
        help=f"contextual phrase model id or path (default: {DEFAULT_PHRASE_MODEL})",
    )
    exp.add_argument(
        "--sentence-model",
        default=DEFAULT_SENTENCE_MODEL,
        help=f"sentence model id or path (default: {DEFAULT_SENTENCE_MODEL})",
    )
    exp.add_argument(
        "--mean-pool-phrases",
        action="store_true",
        help="pool phrase fields by masked mean instead of the first token",
    )
    exp.add_argument("--batch-size", type=int, default=32, help="encoder batch size")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return 2

    fields = tuple(f.strip() for f in args.fields.split(",") if f.strip())
    bad = [f for f in fields if f not in TEXT_FIELDS]
    if bad:
        parser.error(f"unknown field(s) {bad}, valid fields: {', '.join(TEXT_FIELDS)}")

    job = ExportJob(
        records=args.records,
        out_dir=args.out,
        fields=fields,
        backend=args.backend,
        phrase_model=args.phrase_model,
        sentence_model=args.sentence_model,
        mean_pool_phrases=args.mean_pool_phrases,
        batch_size=args.batch_size,
    )
    try:
        report = run_export(job)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SetupError, ExportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    tags = ", ".join(sorted(report["fields"]))
    print(f"wrote {len(report['fields'])} file(s) [{tags}] for "
          f"{report['records']} records -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
