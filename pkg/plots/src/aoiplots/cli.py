"""Batch figure CLI: `plot <kind> --in <csv> --out <file>`."""

import argparse
import sys

from .figures import KINDS, SchemaError, render


def build_parser():
    ap = argparse.ArgumentParser(
        prog="plot",
        description="Render a simulator CSV into a deterministic SVG figure")
    ap.add_argument("kind", choices=sorted(KINDS))
    ap.add_argument("--in", dest="src", required=True, help="input CSV path")
    ap.add_argument("--out", dest="out", required=True, help="output SVG path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = render(args.kind, args.src, args.out)
    except SchemaError as exc:
        sys.stderr.write(f"schema error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 1
    parts = ", ".join(f"{name}: {n}" for name, n in sorted(summary["series"].items()))
    print(f"{args.out}: {args.kind} ({parts})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
