"""Command line: `nfplot render <csv> --x distance|pilot|snr --out fig.svg [--rd M] [--ard M]`."""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, RenderError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfplot", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render a benchmark CSV into a figure")
    p.add_argument("csv", help="benchmark CSV (sweep,method,nmse_db,bound_db,...)")
    p.add_argument("--x", dest="x_axis", choices=("distance", "pilot", "snr"), default="distance")
    p.add_argument("--out", required=True, help="output figure path (.svg or .png)")
    p.add_argument("--rd", type=float, default=None, help="vertical marker (e.g. MIMO-RD) in x units")
    p.add_argument("--ard", type=float, default=None, help="vertical marker (e.g. MIMO-ARD) in x units")
    p.add_argument("--methods", default="", help="comma-separated subset of methods to draw")
    p.add_argument("--log-x", action="store_true", help="logarithmic x axis")
    p.add_argument("--title", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    methods = [m for m in args.methods.split(",") if m]
    spec = None
    try:
        spec = PlotSpec(
            csv_path=args.csv,
            x_axis=args.x_axis,
            out_path=args.out,
            methods=methods,
            rd_marker=args.rd,
            ard_marker=args.ard,
            log_x=args.log_x,
            title=args.title,
        )
        out = render(spec)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
