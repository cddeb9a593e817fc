"""Pseudo-spectral simulator for N interacting populations on periodic
domains, with nonlocal advection, positivity-preserving dynamics,
conservation diagnostics and local-limit collapse probes."""

__version__ = "0.1.0"

from .grid import Field, TorusGrid, integrate, make_grid, wavenumbers
from .kernels import (
    KernelMatrix,
    KernelSpec,
    cosine_bump,
    cosine_bump_value,
    delta,
    gaussian_periodic,
    kernel_symbol,
    sample_on_grid,
    top_hat,
)
from .spectral import (
    SpectralField,
    convolve,
    divergence,
    forward,
    gradient,
    heat_propagate,
    inverse,
    laplacian,
    set_fft_workers,
)
from .dynamics import (
    ModelParams,
    RunResult,
    SimState,
    StepController,
    Termination,
    clamp_h,
    drift_velocity,
    rhs,
    run,
    step_imex,
)
from .diagnostics import (
    BlowupDetector,
    BlowupVerdict,
    DiagnosticsRecord,
    MassPreconditionError,
    assess_blowup,
    case1_threshold,
    case2_condition,
    case2_threshold,
    compute_record,
    moment_bound,
    periodic_center_of_mass,
    second_moment,
    total_mass,
)
from .initial import gaussian_bump, perturbed_uniform, plateau_bump
from .config import ConfigError, ScenarioConfig, emit_toml, load_config, parse_config
from .presets import preset, preset_names
from .runner import ExecutionResult, execute

__all__ = [name for name in dir() if not name.startswith("_")]
