"""Reading the solver's binary field snapshots.

A snapshot file is one ASCII header line ``GRIDv1 nx ny Lx Ly t species``
followed by nx * ny float64 little-endian values in row-major order.  1D
fields arrive with ny = 1 and Ly = 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["SnapshotHandle", "SnapshotFormatError", "load_snapshot", "scan_run_directory"]

_NAME_RE = re.compile(r"^u(\d+)_(\d+)\.grid$")


class SnapshotFormatError(ValueError):
    """Raised for malformed headers or truncated payloads."""


@dataclass(frozen=True)
class SnapshotHandle:
    """One parsed snapshot: header fields plus the value matrix.

    ``finite`` is False for blow-up frames (NaN/Inf in the payload); such
    frames still load so they can be inspected.
    """

    path: Path
    nx: int
    ny: int
    lx: float
    ly: float
    t: float
    species: int
    values: np.ndarray

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    @property
    def is_one_dimensional(self) -> bool:
        return self.ny == 1


def load_snapshot(path) -> SnapshotHandle:
    path = Path(path)
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        parts = header_line.decode("ascii").split()
    except UnicodeDecodeError as exc:
        raise SnapshotFormatError(f"{path}: header is not ASCII") from exc
    if len(parts) != 7 or parts[0] != "GRIDv1":
        raise SnapshotFormatError(
            f"{path}: expected header 'GRIDv1 nx ny Lx Ly t species', got {header_line!r}"
        )
    try:
        nx, ny = int(parts[1]), int(parts[2])
        lx, ly = float(parts[3]), float(parts[4])
        t = float(parts[5])
        species = int(parts[6])
    except ValueError as exc:
        raise SnapshotFormatError(f"{path}: malformed header fields") from exc
    if nx <= 0 or ny <= 0:
        raise SnapshotFormatError(f"{path}: nonpositive grid dimensions {nx} x {ny}")
    expected = nx * ny * 8
    if len(payload) != expected:
        raise SnapshotFormatError(
            f"{path}: payload holds {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(nx, ny)
    return SnapshotHandle(
        path=path, nx=nx, ny=ny, lx=lx, ly=ly, t=t, species=species, values=values
    )


def scan_run_directory(directory) -> dict[int, list[tuple[int, Path]]]:
    """Map species -> [(step index, path), ...] sorted by step index."""
    directory = Path(directory)
    found: dict[int, list[tuple[int, Path]]] = {}
    for path in sorted(directory.glob("u*_*.grid")):
        match = _NAME_RE.match(path.name)
        if not match:
            continue
        species, step = int(match.group(1)), int(match.group(2))
        found.setdefault(species, []).append((step, path))
    for entries in found.values():
        entries.sort()
    return found
