"""Diagnostic time-series loading and plotting.

The solver's series.csv schema is fixed:
``t,species,mass,min,max,l2,linf,neg_l2,M,dMdt_bound`` with one row per
species per sample time.  Mass is plotted as relative deviation from its
initial value, which is the quantity conservation statements bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["SERIES_COLUMNS", "SeriesSchemaError", "SeriesTable", "load_series", "render_series"]

SERIES_COLUMNS = ("t", "species", "mass", "min", "max", "l2", "linf", "neg_l2", "M", "dMdt_bound")


class SeriesSchemaError(ValueError):
    """The CSV header does not match the solver's series schema."""


@dataclass(frozen=True)
class SeriesTable:
    """Parsed series: one dict of column arrays per species index."""

    species: tuple[int, ...]
    per_species: dict

    def column(self, species: int, name: str) -> np.ndarray:
        return self.per_species[species][name]

    def mass_deviation(self, species: int) -> np.ndarray:
        mass = self.column(species, "mass")
        if mass.size == 0 or mass[0] == 0.0:
            return np.zeros_like(mass)
        return mass / mass[0] - 1.0


def load_series(path) -> SeriesTable:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header.split(",") != list(SERIES_COLUMNS):
            raise SeriesSchemaError(
                f"{path}: header {header!r} does not match {','.join(SERIES_COLUMNS)}"
            )
        rows = []
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(SERIES_COLUMNS):
                raise SeriesSchemaError(f"{path}:{line_no}: expected {len(SERIES_COLUMNS)} fields")
            rows.append(parts)
    species_ids = sorted({int(r[1]) for r in rows})
    per_species = {}
    for sp in species_ids:
        mine = [r for r in rows if int(r[1]) == sp]
        cols = {}
        for idx, name in enumerate(SERIES_COLUMNS):
            if name == "species":
                continue
            cols[name] = np.asarray([float(r[idx]) for r in mine])
        per_species[sp] = cols
    return SeriesTable(species=tuple(species_ids), per_species=per_species)


def render_series(series_path, columns, out_path, dpi: int = 130) -> Path:
    """Plot the requested columns, one panel each, one line per species."""
    table = load_series(series_path)
    columns = list(columns)
    for name in columns:
        if name not in SERIES_COLUMNS or name in ("t", "species"):
            raise SeriesSchemaError(f"unknown series column {name!r}")
    fig, axes = plt.subplots(
        len(columns), 1, figsize=(6.4, 2.4 * len(columns)), squeeze=False, sharex=True
    )
    for ax, name in zip(axes[:, 0], columns):
        for sp in table.species:
            t = table.column(sp, "t")
            if name == "mass":
                ax.plot(t, table.mass_deviation(sp), label=f"u{sp}")
                ax.set_ylabel("relative mass deviation")
            else:
                ax.plot(t, table.column(sp, name), label=f"u{sp}")
                ax.set_ylabel(name)
        ax.legend(loc="best", fontsize="small")
    axes[-1, 0].set_xlabel("t")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path
