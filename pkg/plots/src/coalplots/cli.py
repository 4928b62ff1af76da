"""Console entry point: render a figure from an experiment CSV.

Usage:

    coalplot fig1 --in scatter.csv --out figure1.pdf
    coalplot fig2 --in trajectory.csv --out figure2 --panel-label "n=1000"

Exit code 0 on success; 1 with a diagnostic on stderr for schema or I/O
problems.
"""

from __future__ import annotations

import argparse
import sys

from .figures import FigureRequest, render
from .reader import SchemaError


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coalplot",
        description="Render figures from experiment CSV output.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind, blurb in (
            ("fig1", "scatter panels of external vs total length and "
                     "external length vs merger-count power"),
            ("fig2", "one trajectory overlaid with its reference curve")):
        cmd = sub.add_parser(kind, help=blurb)
        cmd.add_argument("--in", dest="input_csv", required=True,
                         metavar="CSV", help="input CSV file")
        cmd.add_argument("--out", dest="output_path", required=True,
                         metavar="IMG",
                         help="output image; extension selects the format, "
                              "no extension means .pdf")
        cmd.add_argument("--panel-label", dest="panel_labels",
                         action="append", metavar="TEXT",
                         help="panel title, repeatable in panel order")
        cmd.add_argument("--dpi", type=int, default=150,
                         help="resolution for raster formats (default 150)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        request = FigureRequest(
            input_csv=args.input_csv,
            kind=args.kind,
            output_path=args.output_path,
            panel_labels=args.panel_labels,
            dpi=args.dpi,
        )
        written = render(request)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(written)
    return 0


if __name__ == "__main__":
    sys.exit(main())
