"""File outputs: diagnostics CSV, binary field snapshots, run manifest.

series.csv: header ``t,species,mass,min,max,l2,linf,neg_l2,M,dMdt_bound``,
one row per species per sample time, UTF-8, '.' decimal separator, LF line
endings.  The M and dMdt_bound columns are run-wide values repeated on every
species row of a sample.

Snapshots ``u{species}_{stepindex}.grid``: an ASCII header line
``GRIDv1 nx ny Lx Ly t species`` followed by the row-major float64
little-endian payload.  1D fields are written with ny = 1 and Ly = 0.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .diagnostics import compute_record
from .dynamics import SimState
from .grid import Field

__all__ = [
    "SERIES_HEADER",
    "SeriesSink",
    "SnapshotSink",
    "write_grid_snapshot",
    "read_grid_snapshot",
    "write_manifest",
]

SERIES_HEADER = "t,species,mass,min,max,l2,linf,neg_l2,M,dMdt_bound"


class SeriesSink:
    """Streams one diagnostics row per species per sample time."""

    def __init__(self, path, interval: float, dmdt_bound: float = float("nan")):
        self.path = Path(path)
        self.interval = float(interval)
        self.dmdt_bound = dmdt_bound
        self.records = []
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        self._fh.write(SERIES_HEADER + "\n")

    def emit(self, state: SimState) -> None:
        rec = compute_record(state, self.dmdt_bound)
        self.records.append(rec)
        for i in range(len(rec.mass)):
            row = ",".join(
                (
                    repr(rec.t),
                    str(i + 1),
                    repr(rec.mass[i]),
                    repr(rec.minimum[i]),
                    repr(rec.maximum[i]),
                    repr(rec.l2[i]),
                    repr(rec.linf[i]),
                    repr(rec.neg_l2[i]),
                    repr(rec.second_moment),
                    repr(rec.dmdt_bound),
                )
            )
            self._fh.write(row + "\n")

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()


class SnapshotSink:
    """Writes one .grid file per species at each sample time."""

    def __init__(self, directory, interval: float):
        self.directory = Path(directory)
        self.interval = float(interval)
        self.files: list[str] = []

    def emit(self, state: SimState) -> None:
        for i, f in enumerate(state.fields):
            name = f"u{i + 1}_{state.step_count:06d}.grid"
            write_grid_snapshot(self.directory / name, f, state.t, i + 1)
            if name not in self.files:
                self.files.append(name)

    def close(self) -> None:
        pass


def write_grid_snapshot(path, f: Field, t: float, species: int) -> None:
    grid = f.grid
    nx = grid.points[0]
    ny = grid.points[1] if grid.dim == 2 else 1
    lx = grid.half_lengths[0]
    ly = grid.half_lengths[1] if grid.dim == 2 else 0.0
    header = f"GRIDv1 {nx} {ny} {lx!r} {ly!r} {t!r} {species}\n"
    payload = np.ascontiguousarray(f.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes(order="C"))


def read_grid_snapshot(path) -> tuple[dict, np.ndarray]:
    """Parse a snapshot; returns (header dict, values array of shape (nx, ny))."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        payload = fh.read()
    try:
        parts = header_line.decode("ascii").split()
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path}: malformed header") from exc
    if len(parts) != 7 or parts[0] != "GRIDv1":
        raise ValueError(f"{path}: expected 'GRIDv1 nx ny Lx Ly t species' header")
    header = {
        "nx": int(parts[1]),
        "ny": int(parts[2]),
        "lx": float(parts[3]),
        "ly": float(parts[4]),
        "t": float(parts[5]),
        "species": int(parts[6]),
    }
    count = header["nx"] * header["ny"]
    expected = count * 8
    if len(payload) != expected:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, expected {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").reshape(header["nx"], header["ny"])
    return header, values


def write_manifest(
    path,
    *,
    config_hash: str,
    version: str,
    started_at: str,
    finished_at: str,
    t_final: float,
    termination: str,
    files: list[str],
) -> dict:
    manifest = {
        "config_hash": config_hash,
        "version": version,
        "started_at": started_at,
        "finished_at": finished_at,
        "t_final": t_final,
        "termination": termination,
        "files": list(files),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest
