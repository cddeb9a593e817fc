"""Independent oracles the tests check the fast paths against.

Everything here deliberately avoids the package's FFT code paths: convolution
is a literal periodic quadrature (shift-and-sum or double loop), derivatives
are 4th-order centered finite differences, integrals use plain summation.
"""

from __future__ import annotations

import numpy as np


def direct_convolution_loops(kernel_offsets: np.ndarray, u: np.ndarray, cell_volume: float) -> np.ndarray:
    """Literal O(n^4) double sum: (K*u)(x_i) = sum_j K(x_i - x_j) u(x_j) dV.

    ``kernel_offsets`` holds the kernel sampled at index offsets (offset 0 at
    index 0, periodic wrap), i.e. numpy.fft.ifftshift of the origin-centered
    samples.
    """
    nx, ny = u.shape
    out = np.zeros_like(u)
    for ix in range(nx):
        for iy in range(ny):
            acc = 0.0
            for jx in range(nx):
                for jy in range(ny):
                    acc += kernel_offsets[(ix - jx) % nx, (iy - jy) % ny] * u[jx, jy]
            out[ix, iy] = acc * cell_volume
    return out


def direct_convolution(kernel_offsets: np.ndarray, u: np.ndarray, cell_volume: float) -> np.ndarray:
    """Periodic quadrature by explicit shift-and-accumulate (no transforms)."""
    out = np.zeros_like(u, dtype=float)
    it = np.ndindex(kernel_offsets.shape)
    for offset in it:
        w = kernel_offsets[offset]
        if w != 0.0:
            shifted = np.roll(u, shift=offset, axis=tuple(range(u.ndim)))
            out += w * shifted
    return out * cell_volume


def fd4_derivative(u: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """4th-order centered first derivative on a periodic axis."""
    up1 = np.roll(u, -1, axis=axis)
    um1 = np.roll(u, 1, axis=axis)
    up2 = np.roll(u, -2, axis=axis)
    um2 = np.roll(u, 2, axis=axis)
    return (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * spacing)


def fd4_laplacian(u: np.ndarray, spacings) -> np.ndarray:
    """4th-order centered Laplacian on a periodic grid."""
    out = np.zeros_like(u, dtype=float)
    for axis, h in enumerate(spacings):
        up1 = np.roll(u, -1, axis=axis)
        um1 = np.roll(u, 1, axis=axis)
        up2 = np.roll(u, -2, axis=axis)
        um2 = np.roll(u, 2, axis=axis)
        out += (-up2 + 16.0 * up1 - 30.0 * u + 16.0 * um1 - um2) / (12.0 * h * h)
    return out


def fd_rhs(fields, diffusion, gamma, kernel_offset_table, grid, clamp=True):
    """Finite-difference assembly of the full right-hand side.

    ``kernel_offset_table[i][j]`` is the offset-ordered sampled kernel for the
    (i, j) pair, or None for the delta kernel (convolution = identity).
    Convolutions use periodic quadrature, derivatives 4th-order stencils.
    """
    n = len(fields)
    spacings = grid.spacings
    cell = grid.cell_volume
    out = []
    for i in range(n):
        u = fields[i]
        drift = [np.zeros_like(u) for _ in range(grid.dim)]
        for j in range(n):
            g = gamma[i][j]
            if g == 0.0:
                continue
            offsets = kernel_offset_table[i][j]
            if offsets is None:
                smoothed = fields[j]
            else:
                smoothed = direct_convolution(offsets, fields[j], cell)
            for axis in range(grid.dim):
                drift[axis] += g * fd4_derivative(smoothed, axis, spacings[axis])
        hu = np.maximum(u, 0.0) if clamp else u
        div = np.zeros_like(u)
        for axis in range(grid.dim):
            div += fd4_derivative(hu * drift[axis], axis, spacings[axis])
        out.append(diffusion[i] * fd4_laplacian(u, spacings) + div)
    return out
