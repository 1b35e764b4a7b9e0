"""Command-line front end.

Results go to stdout as CSV, diagnostics to stderr. Exit status is 0 on
success, 1 for bad input and 2 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .anonymize import anonymize
from .dataset import load_schema, mapping_from_sample, read_table
from .distance import build_context, distance_matrix, matrix_to_csv, sse_distance
from .errors import InvariantBreach, MarginalityError
from .labeling import variance_order_agreement
from .marginality import WeightMode
from .stats import covariance_matrix, summarize
from .taxonomy import load_taxonomy

SEED_ENV = "MARGINALITY_SEED"
DEFAULT_SEED = 42


def _read_column(csv_path: str, attr: str) -> list[str]:
    with open(csv_path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    if not lines:
        raise MarginalityError(f"{csv_path}: empty file")
    header = lines[0].lstrip("﻿").split(",")
    if attr not in header:
        raise MarginalityError(f"{csv_path}: no column {attr!r} in header")
    j = header.index(attr)
    out = []
    for i, line in enumerate(lines[1:], start=1):
        cells = line.split(",")
        if len(cells) != len(header) or not cells[j]:
            raise MarginalityError(f"{csv_path}: row {i} is ragged or has an empty {attr!r} cell")
        out.append(cells[j])
    return out


def cmd_taxonomy_validate(args) -> None:
    tax = load_taxonomy(args.file)
    print(f"nodes={len(tax)} depth={tax.height} b={tax.max_children}")


def cmd_marginality(args) -> None:
    tax = load_taxonomy(args.taxonomy)
    sample = _read_column(args.csv, args.attr)
    for i, value in enumerate(sample, start=1):
        if value not in tax:
            raise MarginalityError(f"row {i}, attribute {args.attr!r}: unknown category {value!r}")
    mapping = mapping_from_sample(args.attr, tax, sample, WeightMode.parse(args.mode))
    sys.stdout.write(mapping.to_csv())


def cmd_stats(args) -> None:
    table = read_table(args.csv, load_schema(args.schema))
    if args.matrix:
        sys.stdout.write(covariance_matrix(table).to_csv())
    else:
        sys.stdout.write(summarize(table))


def cmd_distance(args) -> None:
    table = read_table(args.csv, load_schema(args.schema))
    ctx = build_context(table)
    if args.rows:
        try:
            i, j = (int(x) for x in args.rows.split(","))
            r1, r2 = table.rows[i], table.rows[j]
        except (ValueError, IndexError):
            raise MarginalityError(f"--rows expects two row indices below {table.n}, got {args.rows!r}") from None
        print(repr(sse_distance(r1, r2, ctx)))
    else:
        sys.stdout.write(matrix_to_csv(distance_matrix(table, ctx)))


def groups_path(out: Path) -> Path:
    return out.with_name(out.stem + ".groups.csv")


def cmd_anonymize(args) -> None:
    table = read_table(args.csv, load_schema(args.schema))
    result = anonymize(table, args.k)
    out = Path(args.out)
    out.write_text(result.table.to_csv(), encoding="utf-8")
    groups_path(out).write_text(result.grouping.to_csv(), encoding="utf-8")
    sizes = result.grouping.sizes
    print(f"rows={table.n} groups={len(sizes)} min_size={min(sizes)} max_size={max(sizes)}",
          file=sys.stderr)


def cmd_equivalence_check(args) -> None:
    tax = load_taxonomy(args.taxonomy)
    seed_text = os.environ.get(SEED_ENV, str(DEFAULT_SEED))
    try:
        seed = int(seed_text)
    except ValueError:
        raise MarginalityError(f"{SEED_ENV} must be an integer, got {seed_text!r}") from None
    if args.n < 1 or args.limit < 1:
        raise MarginalityError("--n and --limit must be positive")
    report = variance_order_agreement(tax, args.n, args.limit, seed)
    sys.stdout.write(report.summary_csv())
    sys.stdout.write(report.violations_csv())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margmap",
        description="Marginality mapping, statistics and anonymization for hierarchical nominal data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    tax = sub.add_parser("taxonomy", help="taxonomy utilities")
    tax_sub = tax.add_subparsers(dest="action", required=True)
    val = tax_sub.add_parser("validate", help="parse a taxonomy and print its shape")
    val.add_argument("file")
    val.set_defaults(func=cmd_taxonomy_validate)

    marg = sub.add_parser("marginality", help="marginality mapping of one column")
    marg.add_argument("taxonomy")
    marg.add_argument("csv")
    marg.add_argument("--attr", required=True)
    marg.add_argument("--mode", choices=["fixed", "pruned"], default="fixed")
    marg.set_defaults(func=cmd_marginality)

    st = sub.add_parser("stats", help="means and variances, or the covariance matrix")
    st.add_argument("schema")
    st.add_argument("csv")
    st.add_argument("--matrix", action="store_true")
    st.set_defaults(func=cmd_stats)

    dist = sub.add_parser("distance", help="SSE-distance matrix or one pair")
    dist.add_argument("schema")
    dist.add_argument("csv")
    dist.add_argument("--rows", help="two zero-based row indices, e.g. 0,3")
    dist.set_defaults(func=cmd_distance)

    anon = sub.add_parser("anonymize", help="MDAV microaggregation")
    anon.add_argument("schema")
    anon.add_argument("csv")
    anon.add_argument("--k", type=int, required=True)
    anon.add_argument("--out", required=True, help="anonymized CSV; groups go to <stem>.groups.csv")
    anon.set_defaults(func=cmd_anonymize)

    eq = sub.add_parser("equivalence-check",
                        help="compare the orderings of both variances on size-n samples")
    eq.add_argument("taxonomy")
    eq.add_argument("--n", type=int, required=True)
    eq.add_argument("--limit", type=int, default=100_000)
    eq.set_defaults(func=cmd_equivalence_check)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here
        return 0 if exc.code == 0 else 1
    try:
        args.func(args)
    except InvariantBreach as exc:
        print(f"error: internal invariant breached: {exc}", file=sys.stderr)
        return 2
    except MarginalityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
