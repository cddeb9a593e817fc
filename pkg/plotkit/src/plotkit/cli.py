"""Batch plotting CLI for solver output directories.

``plot heatmap --in DIR [--species i] [--frame k]`` renders snapshots (one
PNG per frame; multi-species frames become aligned panels sharing a color
scale unless --per-panel).  ``plot series --in DIR --cols mass,linf,M``
renders the diagnostics series.  Exit codes: 0 success, 2 input/format
error, 1 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .heatmap import HeatmapStyle, render_heatmap, render_panels
from .series import SeriesSchemaError, render_series
from .snapshots import SnapshotFormatError, load_snapshot, scan_run_directory

__all__ = ["main", "console_main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot", description="Render simulator output files."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_heat = sub.add_parser("heatmap", help="render field snapshots")
    p_heat.add_argument("--in", dest="in_dir", required=True, help="run output directory")
    p_heat.add_argument("--species", type=int, default=None, help="only this species index")
    p_heat.add_argument("--frame", type=int, default=None, help="only this step index")
    p_heat.add_argument("--out", default=None, help="directory for PNGs (default IN/plots)")
    p_heat.add_argument("--per-panel", action="store_true", help="per-panel color scales")
    p_heat.add_argument("--cmap", default="viridis")

    p_series = sub.add_parser("series", help="plot diagnostics columns")
    p_series.add_argument("--in", dest="in_dir", required=True, help="run output directory")
    p_series.add_argument(
        "--cols", default="mass,linf,M", help="comma-separated column names"
    )
    p_series.add_argument("--out", default=None, help="output PNG path")
    return parser


def _cmd_heatmap(args) -> int:
    run_dir = Path(args.in_dir)
    if not run_dir.is_dir():
        raise SnapshotFormatError(f"{run_dir}: not a directory")
    by_species = scan_run_directory(run_dir)
    if args.species is not None:
        by_species = {args.species: by_species.get(args.species, [])}
    if not any(by_species.values()):
        raise SnapshotFormatError(f"{run_dir}: no snapshots matched")
    out_dir = Path(args.out) if args.out else run_dir / "plots"
    out_dir.mkdir(parents=True, exist_ok=True)
    style = HeatmapStyle(cmap=args.cmap)

    by_frame: dict[int, list] = {}
    for species, entries in by_species.items():
        for step, path in entries:
            if args.frame is not None and step != args.frame:
                continue
            by_frame.setdefault(step, []).append(load_snapshot(path))
    if not by_frame:
        raise SnapshotFormatError(f"{run_dir}: no snapshot for frame {args.frame}")
    written = []
    for step in sorted(by_frame):
        handles = sorted(by_frame[step], key=lambda h: h.species)
        if len(handles) == 1:
            h = handles[0]
            out = out_dir / f"u{h.species}_{step:06d}.png"
            render_heatmap(h, out, style)
        else:
            out = out_dir / f"frame_{step:06d}.png"
            render_panels(handles, out, style, share_scale=not args.per_panel)
        written.append(out)
    for path in written:
        print(path)
    return 0


def _cmd_series(args) -> int:
    run_dir = Path(args.in_dir)
    series_path = run_dir / "series.csv"
    if not series_path.exists():
        raise SeriesSchemaError(f"{series_path}: missing")
    columns = [c.strip() for c in args.cols.split(",") if c.strip()]
    if not columns:
        raise SeriesSchemaError("series: --cols named no columns")
    out = Path(args.out) if args.out else run_dir / "plots" / "series.png"
    out.parent.mkdir(parents=True, exist_ok=True)
    render_series(series_path, columns, out)
    print(out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "heatmap":
            return _cmd_heatmap(args)
        if args.command == "series":
            return _cmd_series(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (SnapshotFormatError, SeriesSchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def console_main() -> None:
    sys.exit(main())
