"""CLI: render one figure kind from benchmark output files.

Exit codes: 0 success, 2 usage error, 1 runtime/schema error.
"""

from __future__ import annotations

import argparse
import sys

from .io import (
    SchemaError,
    per_point_errors,
    read_embedding_csv,
    read_record_json,
    read_results_csv,
    total_sse,
)
from .plots import render_scaling, render_scatter, render_tradeoff


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render figures from diffusion-map benchmark output files.",
    )
    parser.add_argument("--kind", choices=("scatter", "scaling", "tradeoff"), required=True)
    parser.add_argument(
        "--in",
        dest="input",
        required=True,
        help="embedding CSV (scatter) or results.csv (scaling/tradeoff)",
    )
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--record", default=None, help="record JSON providing per-point errors (scatter)")
    parser.add_argument("--method", default=None, help="method entry to read from the record (scatter)")
    parser.add_argument("--errors", default=None, help="plain CSV holding one error value per point (scatter)")
    parser.add_argument("--landmarks", default=None, help="CSV of landmark coordinates to overlay (scatter)")
    parser.add_argument("--title", default="diffusion embedding")
    return parser


def _scatter(args) -> None:
    embedding = read_embedding_csv(args.input)
    errors = None
    total = None
    if args.errors is not None:
        errors = [row[0] for row in _error_rows(args.errors)]
    elif args.record is not None:
        if args.method is None:
            raise SchemaError("--record requires --method to select the error vector")
        record = read_record_json(args.record)
        errors = per_point_errors(record, args.method)
        total = total_sse(record, args.method)
    landmarks = read_embedding_csv(args.landmarks) if args.landmarks else None
    render_scatter(
        embedding, errors, args.out, landmarks=landmarks, total_error=total, title=args.title
    )


def _error_rows(path):
    import csv

    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        for line, raw in enumerate(csv.reader(handle), start=1):
            if not raw:
                continue
            try:
                rows.append([float(raw[0])])
            except ValueError:
                raise SchemaError(f"{path}: line {line}: not numeric: {raw[0]!r}") from None
    if not rows:
        raise SchemaError(f"{path}: error file has no rows")
    return rows


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.kind == "scatter":
            _scatter(args)
        elif args.kind == "scaling":
            render_scaling(read_results_csv(args.input), args.out)
        else:
            render_tradeoff(read_results_csv(args.input), args.out)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.kind} figure written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
