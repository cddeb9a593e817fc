import numpy as np
import pytest

from nonlocalpop import Field, make_grid


@pytest.fixture
def grid8():
    return make_grid(2, (0.5, 0.5), (8, 8))


@pytest.fixture
def grid16():
    return make_grid(2, (0.5, 0.5), (16, 16))


@pytest.fixture
def grid64_1d():
    return make_grid(1, (0.5,), (64,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)


def random_field(grid, rng, scale=1.0):
    return Field(grid, scale * rng.standard_normal(grid.shape))


def smooth_random_field(grid, rng, modes=3, offset=0.0):
    """Band-limited random field: seeded trig polynomial up to ``modes``."""
    vals = np.full(grid.shape, float(offset))
    coords = grid.coordinates()
    for _ in range(6):
        ks = [rng.integers(-modes, modes + 1) for _ in range(grid.dim)]
        amp = rng.uniform(-0.3, 0.3)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        wave = np.zeros(grid.shape)
        acc = None
        for axis, (k, x) in enumerate(zip(ks, coords)):
            theta = 2.0 * np.pi * k * x / (2.0 * grid.half_lengths[axis])
            shape = [1] * grid.dim
            shape[axis] = x.size
            term = theta.reshape(shape)
            acc = term if acc is None else acc + term
        wave = np.cos(acc + phase)
        vals = vals + amp * wave
    return Field(grid, vals)
