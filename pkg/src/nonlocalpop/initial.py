"""Initial data builders.

Pattern formation needs a symmetry-breaking seed, so the default start is a
uniform density plus a seeded band-limited perturbation, clipped nonnegative
and rescaled to the requested mass exactly.  Concentrated starts come as a
periodized Gaussian bump or a cosine-edged plateau; the plateau gives
independent control of peak height and mass, which the collapse scenarios
need (supercritical coupling must see enough squared density while the
subcritical twin stays below the backward-diffusion knee).
"""

from __future__ import annotations

import math

import numpy as np

from .grid import Field, TorusGrid, integrate
from .kernels import _gaussian_periodic_1d
from .spectral import irfftn, rfftn, tables

__all__ = ["perturbed_uniform", "gaussian_bump", "plateau_bump"]


def _renormalize(f: Field, mass: float) -> Field:
    current = integrate(f)
    if not current > 0.0:
        raise ValueError("initial profile has nonpositive mass before scaling")
    f.values *= mass / current
    return f


def perturbed_uniform(
    grid: TorusGrid,
    masses,
    amplitude: float,
    seed: int,
    smoothing: float = 0.02,
) -> list[Field]:
    """Uniform density per species plus seeded smooth noise.

    ``amplitude`` is the peak absolute deviation in density units.  The noise
    is white noise smoothed by a Gaussian spectral filter of physical width
    ``smoothing`` (0 disables smoothing), then peak-normalized.  Fields are
    clipped at zero and rescaled so each species carries exactly its target
    mass.
    """
    if amplitude < 0.0:
        raise ValueError("amplitude must be nonnegative")
    rng = np.random.default_rng(seed)
    t = tables(grid)
    fields = []
    for mass in masses:
        if not mass > 0.0:
            raise ValueError(f"species mass must be positive, got {mass}")
        noise = rng.standard_normal(grid.shape)
        if amplitude > 0.0:
            if smoothing > 0.0:
                noise = irfftn(
                    np.exp(-0.5 * smoothing**2 * t.k2) * rfftn(noise, grid.dim),
                    grid.shape,
                )
            peak = float(np.max(np.abs(noise)))
            if peak > 0.0:
                noise = noise / peak
            vals = mass / grid.volume + amplitude * noise
        else:
            vals = np.full(grid.shape, mass / grid.volume)
        vals = np.maximum(vals, 0.0)
        fields.append(_renormalize(Field(grid, vals), mass))
    return fields


def gaussian_bump(grid: TorusGrid, center, width: float, mass: float) -> list[Field]:
    """One species: periodized Gaussian of the given width and mass."""
    if not width > 0.0:
        raise ValueError("width must be positive")
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.dim,):
        raise ValueError(f"center must have {grid.dim} components")
    vals = np.ones(grid.shape)
    for axis, coords in enumerate(grid.coordinates()):
        offset = grid.wrap(coords - center[axis], axis)
        factor = _gaussian_periodic_1d(offset, width, grid.half_lengths[axis])
        shape = [1] * grid.dim
        shape[axis] = coords.size
        vals = vals * factor.reshape(shape)
    return [_renormalize(Field(grid, vals), mass)]


def _plateau_core_radius(height: float, edge_width: float, mass: float, dim: int) -> float:
    """Flat-core radius making the cosine-edged plateau carry ``mass``.

    2D: pi r0^2 + pi w r0 + 2 pi w^2 (1/4 - 1/pi^2) = mass / height
    (closed form of the radial edge integral); 1D: 2 r0 + w = mass / height.
    """
    target = mass / height
    if dim == 1:
        r0 = (target - edge_width) / 2.0
    else:
        a = math.pi
        b = math.pi * edge_width
        c = 2.0 * math.pi * edge_width**2 * (0.25 - 1.0 / math.pi**2) - target
        disc = b * b - 4.0 * a * c
        if disc <= 0.0:
            raise ValueError("plateau parameters admit no core radius")
        r0 = (-b + math.sqrt(disc)) / (2.0 * a)
    if r0 <= 0.0:
        raise ValueError(
            f"plateau of height {height} and edge {edge_width} cannot hold mass {mass}; "
            "raise the height or shrink the edge"
        )
    return r0


def plateau_bump(
    grid: TorusGrid, center, height: float, edge_width: float, mass: float
) -> list[Field]:
    """One species: flat disc of given height with a cosine-smoothed edge.

    The core radius is solved from the mass constraint; the profile is C^1,
    exactly zero outside core + edge, and must fit strictly inside one
    period so it vanishes at the identification seam.
    """
    if not height > 0.0 or not edge_width > 0.0 or not mass > 0.0:
        raise ValueError("height, edge_width and mass must be positive")
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.dim,):
        raise ValueError(f"center must have {grid.dim} components")
    r0 = _plateau_core_radius(height, edge_width, mass, grid.dim)
    outer = r0 + edge_width
    if outer >= min(grid.half_lengths):
        raise ValueError(
            f"plateau extent {outer:.4f} reaches the seam (half-length "
            f"{min(grid.half_lengths)}); lower the mass or raise the height"
        )
    dist2 = np.zeros(grid.shape)
    for axis, coords in enumerate(grid.coordinates()):
        d = grid.wrap(coords - center[axis], axis)
        shape = [1] * grid.dim
        shape[axis] = coords.size
        dist2 = dist2 + (d.reshape(shape)) ** 2
    rho = np.sqrt(dist2)
    vals = np.zeros(grid.shape)
    vals[rho <= r0] = height
    edge = (rho > r0) & (rho < outer)
    vals[edge] = height * 0.5 * (1.0 + np.cos(math.pi * (rho[edge] - r0) / edge_width))
    return [_renormalize(Field(grid, vals), mass)]
