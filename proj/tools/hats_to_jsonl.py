#!/usr/bin/env python3
"""Convert a tab-separated side-by-side file into the JSON Lines dataset read by `mined`.

Each input row holds a reference, two hypotheses and their vote counts. The
column order defaults to the HATS release (reference, hypA, votesA, hypB,
votesB) and can be changed with --columns. A header row is skipped when its
vote columns are not integers.
"""

import argparse
import csv
import json
import sys

FIELDS = ("reference", "hypA", "votesA", "hypB", "votesB")


def parse_args(argv):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("input", help="tab-separated file, or - for stdin")
    p.add_argument("output", nargs="?", default="-", help="JSONL output (default stdout)")
    p.add_argument("--columns", default=",".join(FIELDS),
                   help="comma-separated order of the input columns (default: %(default)s)")
    p.add_argument("--delimiter", default="\t")
    return p.parse_args(argv)


def convert(rows, order):
    for lineno, row in enumerate(rows, start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(order):
            raise ValueError(f"line {lineno}: expected {len(order)} columns, found {len(row)}")
        rec = dict(zip(order, (c.strip() for c in row)))
        try:
            votes_a, votes_b = int(rec["votesA"]), int(rec["votesB"])
        except ValueError:
            if lineno == 1:
                continue  # header
            raise ValueError(f"line {lineno}: vote counts must be integers")
        yield {
            "id": str(lineno),
            "reference": rec["reference"],
            "hypA": rec["hypA"],
            "hypB": rec["hypB"],
            "votesA": votes_a,
            "votesB": votes_b,
        }


def main(argv=None):
    args = parse_args(argv)
    order = [c.strip() for c in args.columns.split(",")]
    if sorted(order) != sorted(FIELDS):
        sys.exit(f"--columns must name each of {', '.join(FIELDS)} once")
    src = sys.stdin if args.input == "-" else open(args.input, newline="", encoding="utf-8")
    dst = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8")
    with src, dst:
        reader = csv.reader(src, delimiter=args.delimiter, quoting=csv.QUOTE_NONE)
        n = 0
        for item in convert(reader, order):
            dst.write(json.dumps(item, ensure_ascii=False) + "\n")
            n += 1
    print(f"wrote {n} items", file=sys.stderr)


if __name__ == "__main__":
    main()
