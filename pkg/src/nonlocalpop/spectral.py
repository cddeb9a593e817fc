"""Fourier-space primitives: transforms, convolution, derivatives, heat flow.

Conventions
-----------
* ``forward`` divides by the cell count, so mode 0 of a SpectralField is the
  field mean (times 1); ``inverse`` undoes this exactly.
* Kernel symbols from :mod:`.kernels` multiply coefficient-wise to realize the
  continuum-normalized convolution: (K * u)^ = K^ . u^.
* Odd-derivative multipliers zero the Nyquist mode, keeping derivatives of
  real fields real.  The Laplacian and heat symbols use the full |k|^2
  including the Nyquist magnitude.

Transforms of distinct fields may run in parallel; ``set_fft_workers``
controls intra-transform threading and results are value-identical for any
worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as _sfft

from .grid import Field, TorusGrid, wavenumbers

__all__ = [
    "SpectralField",
    "forward",
    "inverse",
    "convolve",
    "gradient",
    "divergence",
    "laplacian",
    "heat_propagate",
    "set_fft_workers",
    "get_fft_workers",
]

_workers = 1


def set_fft_workers(n: int) -> None:
    """Set the thread count used inside FFT calls (default 1)."""
    global _workers
    if n < 1:
        raise ValueError("worker count must be >= 1")
    _workers = int(n)


def get_fft_workers() -> int:
    return _workers


def rfftn(a: np.ndarray, dim: int) -> np.ndarray:
    """Real forward transform over the trailing ``dim`` axes (batch-safe)."""
    return _sfft.rfftn(a, axes=tuple(range(-dim, 0)), workers=_workers)


def irfftn(a: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Inverse of :func:`rfftn`; ``shape`` is the trailing spatial shape."""
    return _sfft.irfftn(a, s=shape, axes=tuple(range(-len(shape), 0)), workers=_workers)


@dataclass(frozen=True)
class _Tables:
    """Per-grid spectral multipliers in the packed real-transform layout."""

    half_shape: tuple[int, ...]
    ik: tuple[np.ndarray, ...]   # i * k per axis, Nyquist zeroed, broadcastable
    k2: np.ndarray               # |k|^2 with full Nyquist magnitude
    dealias: np.ndarray          # two-thirds-rule keep mask


@lru_cache(maxsize=None)
def tables(grid: TorusGrid) -> _Tables:
    ks = wavenumbers(grid)
    dim = grid.dim
    half_shape = grid.shape[:-1] + (grid.shape[-1] // 2 + 1,)
    ik = []
    k2 = np.zeros(half_shape)
    dealias = np.ones(half_shape, dtype=bool)
    for axis in range(dim):
        k = ks[axis]
        n = grid.points[axis]
        if axis == dim - 1:
            k = k[: n // 2 + 1]
        k_odd = k.copy()
        # zero the Nyquist in odd-derivative multipliers -> real derivatives
        k_odd[n // 2] = 0.0
        shape = [1] * dim
        shape[axis] = k.size
        ik.append(1j * k_odd.reshape(shape))
        k2 = k2 + (k.reshape(shape)) ** 2
        nyquist = math.pi * (n // 2) / grid.half_lengths[axis]
        dealias &= np.abs(k.reshape(shape)) <= (2.0 / 3.0) * nyquist * (1.0 + 1e-12)
    for a in ik:
        a.setflags(write=False)
    k2.setflags(write=False)
    dealias.setflags(write=False)
    return _Tables(half_shape=half_shape, ik=tuple(ik), k2=k2, dealias=dealias)


@dataclass
class SpectralField:
    """Complex Fourier coefficients of a field, in the grid's mode ordering.

    Coefficients follow the mean convention (mode 0 = field mean).  When the
    coefficients represent a real field they satisfy conjugate symmetry
    u^(-k) = conj(u^(k)) up to roundoff.
    """

    grid: TorusGrid
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=complex)
        if self.coefficients.shape != self.grid.shape:
            raise ValueError("coefficient shape does not match grid")


def forward(f: Field) -> SpectralField:
    f.ensure_finite()
    coeffs = _sfft.fftn(f.values, workers=_workers) / f.grid.n_cells
    return SpectralField(f.grid, coeffs)


def inverse(sf: SpectralField) -> Field:
    vals = _sfft.ifftn(sf.coefficients * sf.grid.n_cells, workers=_workers)
    return Field(sf.grid, vals.real)


def _symbol_to_half(symbol: np.ndarray, grid: TorusGrid) -> np.ndarray:
    """Accept a full-spectrum or packed symbol; return the packed view."""
    half_shape = grid.shape[:-1] + (grid.shape[-1] // 2 + 1,)
    if symbol.shape == half_shape:
        return symbol
    if symbol.shape == grid.shape:
        return symbol[..., : grid.shape[-1] // 2 + 1]
    raise ValueError(
        f"symbol shape {symbol.shape} matches neither grid {grid.shape} "
        f"nor packed {half_shape} layout (grid mismatch?)"
    )


def convolve(symbol: np.ndarray, f: Field) -> Field:
    """Convolution via the Fourier symbol; the tiny imaginary residue of the
    inverse transform is discarded by construction of the real transform."""
    f.ensure_finite()
    sym = _symbol_to_half(np.asarray(symbol), f.grid)
    out = irfftn(sym * rfftn(f.values, f.grid.dim), f.grid.shape)
    return Field(f.grid, out)


def gradient(f: Field) -> list[Field]:
    """Spectral gradient, one component field per dimension."""
    f.ensure_finite()
    t = tables(f.grid)
    fh = rfftn(f.values, f.grid.dim)
    return [Field(f.grid, irfftn(ika * fh, f.grid.shape)) for ika in t.ik]


def divergence(components: list[Field]) -> Field:
    """Spectral divergence of a vector field; annihilates the mean mode, so
    the result integrates to zero."""
    if len(components) == 0:
        raise ValueError("divergence needs at least one component")
    grid = components[0].grid
    if len(components) != grid.dim:
        raise ValueError(f"expected {grid.dim} components, got {len(components)}")
    t = tables(grid)
    acc = np.zeros(t.half_shape, dtype=complex)
    for ika, comp in zip(t.ik, components):
        if comp.grid != grid:
            raise ValueError("divergence components live on different grids")
        comp.ensure_finite()
        acc += ika * rfftn(comp.values, grid.dim)
    return Field(grid, irfftn(acc, grid.shape))


def laplacian(f: Field) -> Field:
    f.ensure_finite()
    t = tables(f.grid)
    fh = rfftn(f.values, f.grid.dim)
    return Field(f.grid, irfftn(-t.k2 * fh, f.grid.shape))


def heat_propagate(f: Field, diffusivity: float, tau: float) -> Field:
    """Exact discrete heat semigroup: multiply modes by exp(-D |k|^2 tau)."""
    if not diffusivity > 0.0:
        raise ValueError("diffusivity must be positive")
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    f.ensure_finite()
    t = tables(f.grid)
    fh = rfftn(f.values, f.grid.dim)
    out = irfftn(np.exp(-diffusivity * tau * t.k2) * fh, f.grid.shape)
    return Field(f.grid, out)
