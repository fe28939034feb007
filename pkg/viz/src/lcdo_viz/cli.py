"""Command-line entry points for the three plotting scripts."""

from __future__ import annotations

import argparse
import sys

from .plots import slice_figure, sweep_figure, trace_figure
from .readers import (
    SweepFormatError,
    TraceFormatError,
    VtkFormatError,
    read_sweep,
    read_trace,
    read_vtk,
)

__all__ = ["trace_main", "sweep_main", "slice_main", "trace_entry", "sweep_entry", "slice_entry"]


def trace_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lcdo-plot-trace", description="Energy-decay figure from trace.csv")
    parser.add_argument("trace", help="trace.csv path")
    parser.add_argument("--out", default="trace.png", help="output image path")
    parser.add_argument("--log-y", action="store_true", help="logarithmic energy axis")
    args = parser.parse_args(argv)
    try:
        data = read_trace(args.trace)
    except (TraceFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig = trace_figure(data, log_y=args.log_y)
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


def sweep_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="lcdo-plot-sweep", description="Anchoring-sweep figures from sweep.csv")
    parser.add_argument("sweep", help="sweep.csv path")
    parser.add_argument("--out", default="sweep.png", help="output image path")
    parser.add_argument(
        "--asymptote",
        type=float,
        default=None,
        help="tangential-limit energy guide line (e.g. from a projection-mode run)",
    )
    args = parser.parse_args(argv)
    try:
        data = read_sweep(args.sweep)
    except (SweepFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig = sweep_figure(data, asymptote=args.asymptote)
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


def slice_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lcdo-plot-slice", description="Mid-plane slice (phi contour, v shading, director quiver)"
    )
    parser.add_argument("vtk", help="final.vtk path")
    parser.add_argument("--out", default="slice.png", help="output image path")
    parser.add_argument("--axis", type=int, default=2, choices=(0, 1, 2), help="slice axis")
    parser.add_argument("--index", type=int, default=None, help="slice index (default: midplane)")
    parser.add_argument("--subsample", type=int, default=2, help="quiver subsampling factor")
    args = parser.parse_args(argv)
    try:
        fields = read_vtk(args.vtk)
    except (VtkFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    index = args.index if args.index is not None else fields.dims[args.axis] // 2
    try:
        fig = slice_figure(fields, args.axis, index, subsample=args.subsample)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


def trace_entry() -> None:
    raise SystemExit(trace_main())


def sweep_entry() -> None:
    raise SystemExit(sweep_main())


def slice_entry() -> None:
    raise SystemExit(slice_main())
