"""Offline rendering of population-simulator outputs: per-species heatmaps,
diagnostic time series, and radius-comparison panels."""

__version__ = "0.1.0"

from .heatmap import HeatmapStyle, render_heatmap, render_panels, shared_range
from .series import (
    SERIES_COLUMNS,
    SeriesSchemaError,
    SeriesTable,
    load_series,
    render_series,
)
from .snapshots import (
    SnapshotFormatError,
    SnapshotHandle,
    load_snapshot,
    scan_run_directory,
)

__all__ = [
    "HeatmapStyle",
    "SERIES_COLUMNS",
    "SeriesSchemaError",
    "SeriesTable",
    "SnapshotFormatError",
    "SnapshotHandle",
    "load_series",
    "load_snapshot",
    "render_heatmap",
    "render_panels",
    "render_series",
    "scan_run_directory",
    "shared_range",
]
