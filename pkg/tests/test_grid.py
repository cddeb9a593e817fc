import math

import numpy as np
import pytest

from nonlocalpop import Field, integrate, make_grid, wavenumbers
from nonlocalpop.spectral import laplacian

from _oracles import fd4_laplacian


class TestMakeGrid:
    def test_unit_2torus(self):
        g = make_grid(2, [0.5, 0.5], [128, 128])
        assert g.spacings == (1.0 / 128, 1.0 / 128)
        assert g.volume == 1.0
        assert g.cell_volume == pytest.approx(1.0 / 128**2, abs=0)

    def test_unit_1torus(self):
        g = make_grid(1, [0.5], [256])
        assert g.spacings == (1.0 / 256,)
        assert g.volume == 1.0

    def test_rejects_odd_count(self):
        with pytest.raises(ValueError):
            make_grid(2, [0.5, 0.5], [7, 128])

    def test_rejects_odd_count_above_minimum(self):
        with pytest.raises(ValueError, match="even"):
            make_grid(2, [0.5, 0.5], [9, 128])

    def test_rejects_tiny_count(self):
        with pytest.raises(ValueError, match=">= 8"):
            make_grid(1, [0.5], [4])

    def test_rejects_nonpositive_half_length(self):
        with pytest.raises(ValueError, match="positive"):
            make_grid(1, [0.0], [16])

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError, match="dim"):
            make_grid(3, [0.5] * 3, [16] * 3)

    def test_spacings_times_points_equals_side_lengths(self):
        g = make_grid(2, [0.7, 1.3], [32, 64])
        for dx, n, side in zip(g.spacings, g.points, g.side_lengths):
            assert dx * n == side

    def test_coordinates_left_closed(self):
        g = make_grid(1, [0.5], [8])
        x = g.coordinates()[0]
        assert x[0] == -0.5
        assert x[-1] == pytest.approx(0.5 - g.spacings[0])
        assert np.all(x < 0.5)


class TestField:
    def test_shape_mismatch(self, grid16):
        with pytest.raises(ValueError, match="shape"):
            Field(grid16, np.zeros((8, 8)))

    def test_nonfinite_flagged(self, grid16):
        f = Field(grid16, np.zeros(grid16.shape))
        f.values[3, 4] = np.inf
        with pytest.raises(ValueError, match="blow-up"):
            f.ensure_finite()


class TestIntegrate:
    def test_constant(self):
        g = make_grid(2, [0.5, 0.5], [32, 32])
        assert integrate(Field(g, np.ones(g.shape))) == pytest.approx(1.0, abs=1e-15)

    def test_single_sine_mode_vanishes(self):
        g = make_grid(1, [0.5], [64])
        x = g.coordinates()[0]
        f = Field(g, np.sin(2 * math.pi * x))
        assert abs(integrate(f)) < 1e-14

    def test_all_nonzero_fourier_modes_vanish(self, grid16):
        xs, ys = grid16.meshgrid()
        for kx, ky in [(1, 0), (0, 3), (2, 2), (5, 7)]:
            f = Field(grid16, np.cos(2 * math.pi * (kx * xs + ky * ys) + 0.37))
            assert abs(integrate(f)) < 1e-13

    def test_gaussian_mass_against_refined_quadrature(self):
        # same analytic density sampled at 64^2 and 256^2; both quadratures
        # must agree because the integrand is smooth and periodic
        def density(g):
            xs, ys = g.meshgrid()
            return np.exp(-(xs**2 + ys**2) / (2 * 0.08**2))

        g1 = make_grid(2, [0.5, 0.5], [64, 64])
        g2 = make_grid(2, [0.5, 0.5], [256, 256])
        m1 = integrate(Field(g1, density(g1)))
        m2 = integrate(Field(g2, density(g2)))
        assert m1 == pytest.approx(m2, abs=1e-10)

    def test_linearity(self, grid16, rng):
        a = rng.standard_normal(grid16.shape)
        b = rng.standard_normal(grid16.shape)
        lhs = integrate(Field(grid16, 2.5 * a - 1.25 * b))
        rhs = 2.5 * integrate(Field(grid16, a)) - 1.25 * integrate(Field(grid16, b))
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_circular_shift_invariance_exact(self, grid16, rng):
        vals = rng.standard_normal(grid16.shape)
        base = integrate(Field(grid16, vals))
        for shift in [(1, 0), (5, 9), (15, 3)]:
            assert integrate(Field(grid16, np.roll(vals, shift, axis=(0, 1)))) == base


class TestWavenumbers:
    def test_fundamental_and_nyquist(self):
        g = make_grid(1, [0.5], [8])
        k = wavenumbers(g)[0]
        assert k[1] == pytest.approx(2 * math.pi)
        assert k[4] == pytest.approx(8 * math.pi)
        assert k[-1] == pytest.approx(-2 * math.pi)

    def test_laplacian_symbol_against_fd_oracle(self):
        g = make_grid(1, [0.5], [256])
        x = g.coordinates()[0]
        f = Field(g, np.sin(2 * math.pi * x))
        spec = laplacian(f).values
        oracle = fd4_laplacian(f.values, g.spacings)
        assert spec == pytest.approx(oracle, abs=1e-5)
        # eigenvalue -(2 pi)^2 at this mode
        mask = np.abs(f.values) > 0.5
        ratio = spec[mask] / f.values[mask]
        assert np.allclose(ratio, -((2 * math.pi) ** 2), atol=1e-9)
