"""Command-line figure rendering.

    spikeplots plot --kind KIND --in PATHS... --out FILE [--overlay]
                    [--title T] [--xlabel X] [--ylabel Y] [--label L ...]

Exit codes: 0 success, 2 bad arguments or input files that don't match
the expected schema, 4 I/O failure while writing.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

from .figures import KINDS, FigureSpec, PlotError, render

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikeplots",
        description="Render figures from spikelattice summary/log-fit files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plot", help="render one figure")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--in", required=True, nargs="+", dest="inputs",
                   help="summary.json files (histogram) or logfit.json files (scaling)")
    p.add_argument("--out", required=True, help="output image (.svg default, .png, .pdf)")
    p.add_argument("--overlay", action="store_true",
                   help="draw exp(-t) on histograms, the fitted curve on mean plots")
    p.add_argument("--title", default="")
    p.add_argument("--xlabel", default="")
    p.add_argument("--ylabel", default="")
    p.add_argument("--label", action="append", default=[],
                   help="legend entry per input, repeatable")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            title=args.title,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            labels=tuple(args.label),
            overlay=args.overlay,
        )
        render(spec, args.out)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
