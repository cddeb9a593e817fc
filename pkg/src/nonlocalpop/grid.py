"""Discrete periodic domains: uniform lattices on the 1- and 2-torus.

The box [-L_1, L_1) x ... x [-L_d, L_d) is identified periodically.  Cell
index j_k sits at x_k = -L_k + j_k * dx_k, so index 0 is the left edge and
the origin is the cell at index n_k // 2.  This left-closed node convention
pins down the FFT phase unambiguously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["TorusGrid", "Field", "make_grid", "integrate", "wavenumbers"]


@dataclass(frozen=True)
class TorusGrid:
    """Immutable description of a periodic lattice.

    Instances are safe to share across threads; all derived quantities are
    pure functions of ``half_lengths`` and ``points``.
    """

    dim: int
    half_lengths: tuple[float, ...]
    points: tuple[int, ...]

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(2.0 * L / n for L, n in zip(self.half_lengths, self.points))

    @property
    def side_lengths(self) -> tuple[float, ...]:
        return tuple(2.0 * L for L in self.half_lengths)

    @property
    def volume(self) -> float:
        return math.prod(self.side_lengths)

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacings)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def n_cells(self) -> int:
        return math.prod(self.points)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Per-dimension node coordinates, each in [-L_k, L_k)."""
        return tuple(
            -L + dx * np.arange(n)
            for L, dx, n in zip(self.half_lengths, self.spacings, self.points)
        )

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Full coordinate arrays of shape ``self.shape`` (row-major axes)."""
        return tuple(np.meshgrid(*self.coordinates(), indexing="ij"))

    def wrap(self, displacement: np.ndarray, axis: int) -> np.ndarray:
        """Minimum-image representative of a displacement along one axis."""
        L = self.half_lengths[axis]
        return np.mod(displacement + L, 2.0 * L) - L


def make_grid(dim: int, half_lengths, points) -> TorusGrid:
    """Build a validated torus grid.

    Parameters
    ----------
    dim : 1 or 2
    half_lengths : sequence of dim positive reals (domain is [-L, L) per axis)
    points : sequence of dim even cell counts, each >= 8 (powers of two
        recommended for transform speed)
    """
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    half_lengths = tuple(float(L) for L in half_lengths)
    points = tuple(int(n) for n in points)
    if len(half_lengths) != dim:
        raise ValueError(f"expected {dim} half_lengths, got {len(half_lengths)}")
    if len(points) != dim:
        raise ValueError(f"expected {dim} cell counts, got {len(points)}")
    for L in half_lengths:
        if not (L > 0.0) or not math.isfinite(L):
            raise ValueError(f"half_lengths must be positive, got {L}")
    for n in points:
        if n < 8:
            raise ValueError(f"cell count {n} too small (need >= 8)")
        if n % 2 != 0:
            raise ValueError(f"cell count {n} must be even")
    return TorusGrid(dim=dim, half_lengths=half_lengths, points=points)


@dataclass
class Field:
    """One species' density sampled on a grid (real, row-major).

    Values must be finite on entry to every operation; a non-finite value is
    treated as a blow-up signal by the integrator, not as data corruption.
    Concurrent reads are safe; writers need exclusive access.
    """

    grid: TorusGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def ensure_finite(self) -> None:
        if not self.is_finite():
            raise ValueError("field contains non-finite values (blow-up signal)")


def integrate(f: Field) -> float:
    """Integral of a field over the torus by the midpoint rule.

    Uses exactly-rounded summation, so the result is invariant under whole-cell
    circular shifts of the data and linear to machine precision.  The midpoint
    rule is spectrally accurate for smooth periodic integrands.
    """
    f.ensure_finite()
    return math.fsum(f.values.ravel()) * f.grid.cell_volume


def wavenumbers(grid: TorusGrid) -> tuple[np.ndarray, ...]:
    """Per-dimension angular wavenumbers in standard FFT ordering.

    Entry j carries k_j = pi * j / L_k for j in {0, 1, ..., n/2,
    -(n/2 - 1), ..., -1}; the Nyquist slot holds +n/2 (its sign is
    immaterial for even symbols and it is zeroed in odd derivatives).
    The Laplacian symbol on these modes is -|k|^2.
    """
    out = []
    for L, n in zip(grid.half_lengths, grid.points):
        j = np.fft.fftfreq(n, d=1.0 / n)
        j[n // 2] = n // 2
        out.append(j * (math.pi / L))
    return tuple(out)
