"""Acceptance gate: one test per release criterion, at pinned tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS line per
criterion.  The figure-scenario runs are shared across criteria through
module-scoped fixtures, so the whole gate stays inside its runtime budgets.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from nonlocalpop import (
    BlowupDetector,
    Field,
    KernelMatrix,
    ModelParams,
    SimState,
    StepController,
    case1_threshold,
    case2_threshold,
    compute_record,
    cosine_bump,
    delta,
    execute,
    gaussian_periodic,
    integrate,
    kernel_symbol,
    make_grid,
    rhs,
    run,
    sample_on_grid,
    top_hat,
)
from nonlocalpop.diagnostics import MassPreconditionError, centered_slopes, run_moment_bound
from nonlocalpop.kernels import _cosine_profile
from nonlocalpop.presets import preset, preset_names
from nonlocalpop.spectral import convolve, gradient

from _oracles import direct_convolution, direct_convolution_loops, fd_rhs

FIGURE_PRESETS = [n for n in preset_names() if n.startswith("fig")]


def _report(name, detail):
    print(f"ACCEPTANCE PASS: {name} ({detail})")


class RecordSink:
    def __init__(self, interval, bound=float("nan")):
        self.interval = interval
        self.bound = bound
        self.records = []

    def emit(self, state):
        self.records.append(compute_record(state, self.bound))


@pytest.fixture(scope="module")
def figure_runs_64():
    """All figure presets on the 64^2 torus to t_end = 10, with records."""
    results = {}
    t0 = time.perf_counter()
    for name in FIGURE_PRESETS:
        cfg = preset(name)
        cfg = replace(
            cfg,
            grid=replace(cfg.grid, points=(64, 64)),
            time=replace(cfg.time, t_end=10.0),
        )
        grid = cfg.build_grid()
        params = cfg.build_params()
        fields = cfg.build_initial(grid)
        sink = RecordSink(interval=1.0)
        res = run(
            SimState(t=0.0, fields=fields),
            params,
            cfg.time.t_end,
            controller=cfg.build_controller(),
            sinks=[sink],
            scheme=cfg.time.scheme,
        )
        results[name] = (res, sink.records)
    elapsed = time.perf_counter() - t0
    return results, elapsed


@pytest.fixture(scope="module")
def steepening_runs_128():
    """fig1a and fig1b at their native 128^2 resolution, t_end = 10."""
    finals = {}
    t0 = time.perf_counter()
    for name in ("fig1a", "fig1b"):
        cfg = replace(preset(name), time=replace(preset(name).time, t_end=10.0))
        grid = cfg.build_grid()
        fields = cfg.build_initial(grid)
        res = run(
            SimState(t=0.0, fields=fields),
            cfg.build_params(),
            cfg.time.t_end,
            controller=cfg.build_controller(),
            scheme=cfg.time.scheme,
        )
        finals[name] = res
    return finals, time.perf_counter() - t0


def test_oracle_convolution():
    """FFT convolution == direct periodic quadrature, all kernel kinds."""
    t0 = time.perf_counter()
    grid = make_grid(2, (0.5, 0.5), (8, 8))
    rng = np.random.default_rng(2718)
    specs = [cosine_bump(0.3), top_hat(0.2), gaussian_periodic(0.1), delta()]
    worst = 0.0
    for spec in specs:
        sym = kernel_symbol(spec, grid)
        offsets = (
            None
            if spec.is_delta
            else np.fft.ifftshift(sample_on_grid(spec, grid).values)
        )
        for trial in range(100):
            u = rng.standard_normal(grid.shape)
            fast = convolve(sym, Field(grid, u)).values
            direct = u if offsets is None else direct_convolution(offsets, u, grid.cell_volume)
            worst = max(worst, float(np.max(np.abs(fast - direct))))
    # cross-validate the two oracle implementations once
    spec = cosine_bump(0.3)
    offsets = np.fft.ifftshift(sample_on_grid(spec, grid).values)
    u = rng.standard_normal(grid.shape)
    a = direct_convolution(offsets, u, grid.cell_volume)
    b = direct_convolution_loops(offsets, u, grid.cell_volume)
    assert np.max(np.abs(a - b)) < 1e-12
    elapsed = time.perf_counter() - t0
    assert worst < 1e-12
    assert elapsed < 5.0
    _report("oracle convolution", f"max err {worst:.2e}, {elapsed:.2f}s")


def test_kernel_normalization():
    """Sampled cosine kernels: discrete mass exactly 1, raw mass within 1e-4."""
    t0 = time.perf_counter()
    grid = make_grid(2, (0.5, 0.5), (128, 128))
    mesh = grid.meshgrid()
    rho = np.sqrt(sum(c**2 for c in mesh))
    worst_renorm = 0.0
    worst_raw = 0.0
    for r in (0.1, 0.2, 0.3, 0.4):
        sampled = sample_on_grid(cosine_bump(r), grid)
        worst_renorm = max(worst_renorm, abs(integrate(sampled) - 1.0))
        raw = _cosine_profile(r, rho, 2).sum() * grid.cell_volume
        worst_raw = max(worst_raw, abs(raw - 1.0))
    elapsed = time.perf_counter() - t0
    assert worst_renorm < 1e-12
    assert worst_raw < 1e-4
    assert elapsed < 5.0
    _report(
        "kernel normalization",
        f"renormalized off by {worst_renorm:.2e}, raw by {worst_raw:.2e}, {elapsed:.2f}s",
    )


def test_heat_semigroup_exactness():
    """Single-mode decay matches exp(-D k^2 tau); composition is exact."""
    grid = make_grid(1, (0.5,), (64,))
    x = grid.coordinates()[0]
    u = Field(grid, np.sin(2 * math.pi * x))
    from nonlocalpop import heat_propagate

    decayed = heat_propagate(u, 1.0, 0.01)
    factor = math.exp(-4 * math.pi**2 * 0.01)
    err_decay = float(np.max(np.abs(decayed.values - factor * u.values)))
    assert err_decay < 1e-10

    rng = np.random.default_rng(99)
    grid2 = make_grid(2, (0.5, 0.5), (32, 32))
    w = Field(grid2, rng.standard_normal(grid2.shape))
    one = heat_propagate(w, 0.8, 0.02)
    two = heat_propagate(heat_propagate(w, 0.8, 0.0125), 0.8, 0.0075)
    err_comp = float(np.max(np.abs(one.values - two.values)))
    assert err_comp < 1e-12
    _report("heat semigroup", f"decay err {err_decay:.2e}, composition err {err_comp:.2e}")


def test_positive_part_inequality_suite():
    """Norm inequalities of the positive-part cutoff: 1000 fields, 0 violations."""
    grid = make_grid(1, (0.5,), (64,))
    cell = grid.cell_volume
    rng = np.random.default_rng(424242)
    violations = 0
    for trial in range(1000):
        v = rng.standard_normal(grid.shape) * rng.uniform(0.5, 3.0)
        w = rng.standard_normal(grid.shape)
        hv = np.maximum(v, 0.0)
        hw = np.maximum(w, 0.0)
        grad = gradient(Field(grid, v))[0].values
        masked = np.where(v > 0.0, grad, 0.0)  # gradient of h(v), weak sense
        l2 = lambda a: math.sqrt(float(np.sum(a * a)) * cell)
        l1 = lambda a: float(np.sum(np.abs(a))) * cell
        if l2(hv) > l2(v) + 1e-12:
            violations += 1
        if l2(masked) > l2(grad) + 1e-12:
            violations += 1
        if l1(hv * grad) > l1(v * grad) + 1e-12:
            violations += 1
        if l2(hv - hw) > l2(v - w) + 1e-12:
            violations += 1
    assert violations == 0
    _report("positive-part inequalities", "1000 fields x 4 inequalities, 0 violations")


def test_mass_conservation_figure_presets(figure_runs_64):
    """Every figure preset conserves each species' mass to 1e-8 relative."""
    results, elapsed = figure_runs_64
    worst = 0.0
    for name, (res, records) in results.items():
        assert res.termination.kind == "completed", f"{name}: {res.termination.label}"
        initial = records[0].mass
        for rec in records:
            for m0, m in zip(initial, rec.mass):
                worst = max(worst, abs(m - m0) / m0)
    assert worst < 1e-8
    assert elapsed < 120.0
    _report(
        "mass conservation",
        f"{len(results)} presets to t=10 at 64^2, worst drift {worst:.2e}, {elapsed:.1f}s",
    )


def test_positivity_figure_presets(figure_runs_64):
    """Nonnegative starts stay nonnegative to within -1e-8 * ||u||_inf."""
    results, _ = figure_runs_64
    worst = 0.0
    for name, (res, records) in results.items():
        for rec in records:
            for mn, linf in zip(rec.minimum, rec.linf):
                if linf > 0:
                    worst = min(worst, mn / linf) if mn < 0 else worst
                assert mn >= -1e-8 * linf, f"{name}: min {mn} vs linf {linf}"
    # companion Lyapunov check: pure diffusion from sign-changing data
    grid = make_grid(1, (0.5,), (128,))
    params = ModelParams(
        diffusion=(1.0,), gamma=((0.0,),), kernels=KernelMatrix.uniform(delta(), 1)
    )
    x = grid.coordinates()[0]
    sink = RecordSink(interval=0.002)
    run(
        SimState(t=0.0, fields=[Field(grid, np.sin(2 * math.pi * x) + 0.3)]),
        params,
        0.05,
        controller=StepController(dt_max=1e-3),
        sinks=[sink],
    )
    neg = [rec.neg_l2[0] for rec in sink.records]
    assert neg[0] > 0.0
    for earlier, later in zip(neg, neg[1:]):
        assert later <= earlier + 1e-10
    _report("positivity", f"worst min/linf ratio {worst:.2e}; ||u-||_2 non-increasing")


def test_threshold_formulas():
    """Closed-form collapse thresholds and their mass preconditions."""
    assert case1_threshold(1.0, 1.0, 1.0) == -2.0
    assert case2_threshold(2.0, 1.0, 1.0, 2) == -4.0
    with pytest.raises(MassPreconditionError):
        case1_threshold(0.5, 1.0, 1.0)
    with pytest.raises(MassPreconditionError):
        case2_threshold(1.0, 1.0, 1.0, 2)
    _report("threshold formulas", "case1(1,1,1) = -2, case2(2,1,1,2) = -4, preconditions enforced")


def test_blowup_dichotomy(tmp_path):
    """gamma = -2.5 collapses (exit 3) within t <= 10; gamma = -0.5 stays bounded."""
    t0 = time.perf_counter()
    blow = execute(preset("case1-blowup"), out_dir=tmp_path / "blow")
    assert blow.exit_code == 3
    assert blow.termination.is_blowup
    assert blow.termination.t <= 10.0
    safe = execute(preset("case1-safe"), out_dir=tmp_path / "safe")
    assert safe.exit_code == 0
    assert safe.termination.kind == "completed"
    assert safe.termination.t == 10.0
    linf = max(float(np.max(np.abs(f.values))) for f in safe.state.fields)
    assert linf < 1e8
    elapsed = time.perf_counter() - t0
    assert elapsed < 120.0
    _report(
        "blow-up dichotomy",
        f"supercritical exits 3 at t={blow.termination.t:.2e}; "
        f"safe completes with linf {linf:.3f}; {elapsed:.1f}s",
    )


def test_second_moment_monitor():
    """Measured dM/dt stays below the regime bound before detection."""
    cfg = preset("case1-blowup")
    grid = cfg.build_grid()
    params = cfg.build_params()
    fields = cfg.build_initial(grid)
    bound = run_moment_bound(params, fields)
    assert bound == pytest.approx(-1.0, abs=1e-9)
    ctrl = cfg.build_controller()
    det = BlowupDetector(ctrl, interval=1e-5, dmdt_bound=bound)
    res = run(
        SimState(t=0.0, fields=fields), params, cfg.time.t_end,
        controller=ctrl, sinks=[det], scheme=cfg.time.scheme,
    )
    assert res.termination.is_blowup
    ts = np.asarray(det.times)
    ms = np.asarray(det.moments)
    keep = ts < res.termination.t  # strictly pre-detection samples
    mid, slopes = centered_slopes(ts[keep], ms[keep])
    assert slopes.size >= 3
    tol = 0.1 * abs(bound)
    assert np.all(slopes <= bound + tol)
    _report(
        "second-moment monitor",
        f"{slopes.size} pre-detection slopes, max {slopes.max():.3f} <= {bound + tol:.3f}",
    )


def test_steepening_trend(steepening_runs_128):
    """Smaller detection radius ends steeper: linf(r=0.2) > linf(r=0.3)."""
    finals, elapsed = steepening_runs_128
    linf = {}
    for name, res in finals.items():
        assert res.termination.kind == "completed", f"{name}: {res.termination.label}"
        linf[name] = max(float(np.max(np.abs(f.values))) for f in res.state.fields)
    assert linf["fig1b"] > linf["fig1a"]
    assert elapsed < 300.0
    _report(
        "steepening trend",
        f"linf(r=0.2) = {linf['fig1b']:.4f} > linf(r=0.3) = {linf['fig1a']:.4f}, {elapsed:.1f}s",
    )


def test_rhs_consistency_order():
    """Spectral RHS vs 4th-order finite differences: observed order >= 3.5."""
    gamma = ((-1.0, 0.8), (0.5, -1.2))
    diffusion = (1.0, 0.7)
    radii = ((0.35, 0.3), (0.25, 0.35))

    def manufactured(grid):
        xs, ys = grid.meshgrid()
        u1 = 1.3 + 0.5 * np.sin(2 * math.pi * xs) * np.cos(4 * math.pi * ys) \
            + 0.25 * np.cos(2 * math.pi * ys)
        u2 = 1.1 + 0.4 * np.cos(4 * math.pi * xs) * np.sin(2 * math.pi * ys) \
            + 0.2 * np.sin(2 * math.pi * xs)
        return [Field(grid, u1), Field(grid, u2)]

    errors = []
    for n in (16, 32, 64):
        grid = make_grid(2, (0.5, 0.5), (n, n))
        kernels = KernelMatrix.from_rows(
            [[cosine_bump(r) for r in row] for row in radii]
        )
        params = ModelParams(diffusion=diffusion, gamma=gamma, kernels=kernels)
        fields = manufactured(grid)
        spectral = rhs(SimState(t=0.0, fields=fields), params)
        offsets = [
            [np.fft.ifftshift(sample_on_grid(kernels[i, j], grid).values) for j in range(2)]
            for i in range(2)
        ]
        oracle = fd_rhs(
            [f.values for f in fields], diffusion, gamma, offsets, grid, clamp=True
        )
        err = max(
            float(np.max(np.abs(s.values - o))) for s, o in zip(spectral, oracle)
        )
        errors.append(err)
    order1 = math.log2(errors[0] / errors[1])
    order2 = math.log2(errors[1] / errors[2])
    assert min(order1, order2) >= 3.5
    _report(
        "rhs consistency",
        f"errors {errors[0]:.2e} -> {errors[1]:.2e} -> {errors[2]:.2e}, "
        f"orders {order1:.2f}, {order2:.2f}",
    )
