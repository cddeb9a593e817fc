"""Interaction kernels: closed forms, grid sampling, and Fourier symbols.

Every non-delta kernel integrates to one over the torus, so convolving with
it is a local average over the detection radius.  Sampled kernels are
renormalized to unit discrete mass, which makes the constant state an exact
discrete equilibrium of the dynamics.  The delta (local-limit) kernel is
handled purely in Fourier space as the all-ones symbol; a grid spike of
height 1/dx^n is never materialized.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .grid import Field, TorusGrid, integrate

__all__ = [
    "KernelSpec",
    "KernelMatrix",
    "cosine_bump",
    "top_hat",
    "gaussian_periodic",
    "delta",
    "cosine_bump_value",
    "sample_on_grid",
    "kernel_symbol",
]

_KINDS = ("cosine", "tophat", "gaussian", "delta")


@dataclass(frozen=True)
class KernelSpec:
    """One interaction kernel: a shape plus its length scale in domain units.

    ``radius`` applies to the compactly supported kinds ("cosine", "tophat"),
    ``width`` to "gaussian"; "delta" carries neither.  The length scale must
    be smaller than every domain half-length so the support fits in one
    period without self-overlap (checked against a concrete grid when
    sampling).
    """

    kind: str
    radius: float | None = None
    width: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; choose from {_KINDS}")
        if self.kind in ("cosine", "tophat"):
            if self.radius is None or not (self.radius > 0.0):
                raise ValueError(f"{self.kind} kernel needs a positive radius")
            if self.width is not None:
                raise ValueError(f"{self.kind} kernel takes radius, not width")
        elif self.kind == "gaussian":
            if self.width is None or not (self.width > 0.0):
                raise ValueError("gaussian kernel needs a positive width")
            if self.radius is not None:
                raise ValueError("gaussian kernel takes width, not radius")
        else:  # delta
            if self.radius is not None or self.width is not None:
                raise ValueError("delta kernel takes no length scale")

    @property
    def is_delta(self) -> bool:
        return self.kind == "delta"

    @property
    def length_scale(self) -> float | None:
        return self.radius if self.radius is not None else self.width


def cosine_bump(radius: float) -> KernelSpec:
    return KernelSpec("cosine", radius=radius)


def top_hat(radius: float) -> KernelSpec:
    """Uniform averaging disc.

    Its edge is discontinuous, so it sits outside the twice-differentiable
    smoothness assumptions behind the solver's well-posedness guarantees;
    provided for numerical experiments only.
    """
    return KernelSpec("tophat", radius=radius)


def gaussian_periodic(width: float) -> KernelSpec:
    return KernelSpec("gaussian", width=width)


def delta() -> KernelSpec:
    return KernelSpec("delta")


@dataclass(frozen=True)
class KernelMatrix:
    """N x N array of kernels; entry (i, j) is how species i senses species j.

    No symmetry is required: K_ij may differ from K_ji.
    """

    specs: tuple[tuple[KernelSpec, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.specs)
        if n == 0:
            raise ValueError("kernel matrix must have at least one row")
        for row in self.specs:
            if len(row) != n:
                raise ValueError("kernel matrix must be square")

    @classmethod
    def uniform(cls, spec: KernelSpec, n_species: int) -> "KernelMatrix":
        row = (spec,) * n_species
        return cls(specs=(row,) * n_species)

    @classmethod
    def from_rows(cls, rows) -> "KernelMatrix":
        return cls(specs=tuple(tuple(row) for row in rows))

    @property
    def n_species(self) -> int:
        return len(self.specs)

    def __getitem__(self, ij) -> KernelSpec:
        i, j = ij
        return self.specs[i][j]


def _cosine_profile(radius: float, rho: np.ndarray, dim: int) -> np.ndarray:
    """Raised-cosine bump of unit continuum mass, evaluated at distances rho.

    2D: pi / (r^2 (pi^2 - 4)) * (1 + cos(pi rho / r)) inside rho <= r, else 0.
    1D: 1 / (2 r) * (1 + cos(pi x / r)) on |x| <= r, the same shape with the
    constant fixed by unit mass on the line.
    """
    if dim == 2:
        const = math.pi / (radius**2 * (math.pi**2 - 4.0))
    else:
        const = 1.0 / (2.0 * radius)
    inside = rho <= radius
    out = np.zeros_like(rho, dtype=float)
    out[inside] = const * (1.0 + np.cos(math.pi * rho[inside] / radius))
    return out


def _tophat_profile(radius: float, rho: np.ndarray, dim: int) -> np.ndarray:
    const = 1.0 / (math.pi * radius**2) if dim == 2 else 1.0 / (2.0 * radius)
    return np.where(rho <= radius, const, 0.0)


def _gaussian_periodic_1d(x: np.ndarray, width: float, half_length: float) -> np.ndarray:
    """Periodized unit-mass 1D Gaussian: sum of images over the covering line."""
    n_images = int(math.ceil((10.0 * width) / (2.0 * half_length))) + 1
    out = np.zeros_like(x, dtype=float)
    norm = 1.0 / (width * math.sqrt(2.0 * math.pi))
    for m in range(-n_images, n_images + 1):
        shifted = x + 2.0 * half_length * m
        out += norm * np.exp(-0.5 * (shifted / width) ** 2)
    return out


def cosine_bump_value(radius: float, displacement) -> float:
    """Closed-form raised-cosine kernel at a single displacement vector."""
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    disp = np.atleast_1d(np.asarray(displacement, dtype=float))
    rho = np.sqrt(np.sum(disp**2))
    return float(_cosine_profile(radius, np.asarray([rho]), dim=disp.size)[0])


def _check_support(spec: KernelSpec, grid: TorusGrid) -> None:
    scale = spec.length_scale
    if scale is not None and scale >= min(grid.half_lengths):
        raise ValueError(
            f"kernel scale {scale} does not fit: needs < min half-length "
            f"{min(grid.half_lengths)} so the support spans less than one period"
        )


def sample_on_grid(spec: KernelSpec, grid: TorusGrid) -> Field:
    """Sample a kernel at minimum-image displacements from the origin.

    The grid nodes already live in [-L_k, L_k), so they are their own
    minimum-image representatives.  The sampled values are divided by their
    discrete mass, making integrate() exactly one.
    """
    if spec.is_delta:
        raise ValueError(
            "delta kernel is spectral-only (symbol == 1); it has no grid samples"
        )
    _check_support(spec, grid)
    mesh = grid.meshgrid()
    rho = np.sqrt(sum(c**2 for c in mesh))
    if spec.kind == "cosine":
        vals = _cosine_profile(spec.radius, rho, grid.dim)
    elif spec.kind == "tophat":
        vals = _tophat_profile(spec.radius, rho, grid.dim)
    else:  # gaussian: separable product of periodized 1D factors
        vals = np.ones(grid.shape, dtype=float)
        for axis, coords in enumerate(grid.coordinates()):
            factor = _gaussian_periodic_1d(coords, spec.width, grid.half_lengths[axis])
            shape = [1] * grid.dim
            shape[axis] = grid.points[axis]
            vals = vals * factor.reshape(shape)
    f = Field(grid, vals)
    mass = integrate(f)
    if not mass > 0.0:
        raise ValueError(f"sampled kernel has nonpositive mass {mass}")
    f.values /= mass
    return f


_symbol_cache: dict = {}
_symbol_lock = threading.Lock()


def kernel_symbol(spec: KernelSpec, grid: TorusGrid) -> np.ndarray:
    """Fourier symbol K^ such that (K * u)^ = K^ . u^ with continuum scaling.

    Mode 0 of a unit-mass kernel is exactly 1.  The delta kernel's symbol is
    identically 1, so convolving with it is the identity.  Results are cached
    per (spec, grid) and returned read-only; concurrent readers are safe.
    """
    key = (spec, grid, "full")
    with _symbol_lock:
        hit = _symbol_cache.get(key)
    if hit is not None:
        return hit
    if spec.is_delta:
        sym = np.ones(grid.shape, dtype=complex)
    else:
        sampled = sample_on_grid(spec, grid)
        # ifftshift moves the origin-centered samples into offset order
        # (peak at index 0) so the plain DFT convolution theorem applies.
        sym = np.fft.fftn(np.fft.ifftshift(sampled.values)) * grid.cell_volume
    sym.setflags(write=False)
    with _symbol_lock:
        _symbol_cache[key] = sym
    return sym


def kernel_symbol_half(spec: KernelSpec, grid: TorusGrid) -> np.ndarray:
    """Symbol in the packed real-transform layout (last axis halved).

    Internal fast path for the integrator; same scaling as kernel_symbol.
    """
    key = (spec, grid, "half")
    with _symbol_lock:
        hit = _symbol_cache.get(key)
    if hit is not None:
        return hit
    half_shape = grid.shape[:-1] + (grid.shape[-1] // 2 + 1,)
    if spec.is_delta:
        sym = np.ones(half_shape, dtype=complex)
    else:
        sampled = sample_on_grid(spec, grid)
        sym = np.fft.rfftn(np.fft.ifftshift(sampled.values)) * grid.cell_volume
    sym.setflags(write=False)
    with _symbol_lock:
        _symbol_cache[key] = sym
    return sym
