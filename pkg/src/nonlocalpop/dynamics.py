"""Time integration of the interacting-population system.

Each species' density obeys

    du_i/dt = D_i Lap(u_i) + div( H(u_i) * sum_j gamma_ij grad(K_ij * u_j) )

where H is the positive-part cutoff when clamping is enabled (the advective
flux shuts off wherever a density has undershot zero) and the identity
otherwise.  gamma_ij > 0 means species i avoids species j, gamma_ij < 0
attraction.

Stepping uses an integrating-factor scheme: diffusion is applied exactly
through the heat multiplier while the nonlinear divergence term is explicit,

    u_i^(t+dt) = exp(-D_i |k|^2 dt) * (u_i^(t) + dt * N_i^(t)).

The divergence annihilates mode 0 and the heat factor fixes it, so each
species' mass is conserved to roundoff by construction.  A second-order
variant ("if-heun", Heun's method on the transformed variable) is available
behind a configuration switch.

Within a step the species right-hand sides are independent and are evaluated
as batched array operations; the time loop itself is sequential.  Observers
are invoked synchronously between steps with immutable state copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Field, TorusGrid
from .kernels import KernelMatrix, kernel_symbol_half
from .spectral import convolve, divergence, gradient, irfftn, laplacian, rfftn, tables

__all__ = [
    "ModelParams",
    "SimState",
    "StepController",
    "Termination",
    "RunResult",
    "clamp_h",
    "drift_velocity",
    "rhs",
    "step_imex",
    "run",
    "SCHEMES",
]

SCHEMES = ("if-euler", "if-heun")


@dataclass(frozen=True)
class ModelParams:
    """Model coefficients: diffusion, coupling matrix, kernels, flags."""

    diffusion: tuple[float, ...]
    gamma: tuple[tuple[float, ...], ...]
    kernels: KernelMatrix
    clamp_enabled: bool = True
    dealias: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "diffusion", tuple(float(d) for d in self.diffusion))
        object.__setattr__(
            self, "gamma", tuple(tuple(float(g) for g in row) for row in self.gamma)
        )
        n = len(self.diffusion)
        if n < 1:
            raise ValueError("need at least one species")
        for d in self.diffusion:
            if not (d > 0.0) or not math.isfinite(d):
                raise ValueError(f"diffusion coefficients must be positive, got {d}")
        if len(self.gamma) != n or any(len(row) != n for row in self.gamma):
            raise ValueError(f"gamma must be {n} x {n}")
        for row in self.gamma:
            for g in row:
                if not math.isfinite(g):
                    raise ValueError("gamma entries must be finite")
        if self.kernels.n_species != n:
            raise ValueError(
                f"kernel matrix is {self.kernels.n_species} x {self.kernels.n_species}, "
                f"expected {n} x {n}"
            )

    @property
    def n_species(self) -> int:
        return len(self.diffusion)

    def gamma_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)


@dataclass
class SimState:
    """Simulation state: time, one field per species, step bookkeeping."""

    t: float
    fields: list[Field]
    dt: float = 0.0
    step_count: int = 0

    @property
    def grid(self) -> TorusGrid:
        return self.fields[0].grid


@dataclass(frozen=True)
class StepController:
    """Adaptive step-size policy and blow-up ceiling.

    dt is capped by dt_max and by cfl * min(dx) / max |drift|; a CFL-driven
    dt below dt_min terminates the run as a blow-up proxy, as does any
    density magnitude above linf_ceiling or a non-finite value.
    """

    cfl: float = 0.25
    dt_max: float = 1e-2
    dt_min: float = 1e-12
    linf_ceiling: float = 1e8

    def __post_init__(self) -> None:
        if not (0.0 < self.cfl):
            raise ValueError("cfl must be positive")
        if not (0.0 < self.dt_min < self.dt_max):
            raise ValueError("need 0 < dt_min < dt_max")
        if not self.linf_ceiling > 0.0:
            raise ValueError("linf_ceiling must be positive")

    def propose(self, vmax: float, dx_min: float) -> float:
        if vmax > 0.0:
            return min(self.dt_max, self.cfl * dx_min / vmax)
        return self.dt_max


@dataclass(frozen=True)
class Termination:
    """How a run ended; ``detail`` is set for blow-up terminations."""

    kind: str  # "completed" | "blowup"
    detail: str | None
    t: float
    step_count: int

    @property
    def is_blowup(self) -> bool:
        return self.kind == "blowup"

    @property
    def label(self) -> str:
        return self.kind if self.detail is None else f"{self.kind}-{self.detail}"


@dataclass(frozen=True)
class RunResult:
    state: SimState
    termination: Termination


def clamp_h(f: Field) -> Field:
    """Positive-part cutoff: pointwise max(u, 0)."""
    return Field(f.grid, np.maximum(f.values, 0.0))


class Engine:
    """Precomputed spectral machinery for one (params, grid) pair.

    Holds the packed kernel symbols, derivative multipliers and per-species
    diffusion stencil; all step work runs as batched array ops over species.
    """

    def __init__(self, params: ModelParams, grid: TorusGrid, scheme: str = "if-euler"):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
        self.params = params
        self.grid = grid
        self.scheme = scheme
        self.n = params.n_species
        self.dim = grid.dim
        t = tables(grid)
        self.ik = t.ik
        self.k2 = t.k2
        self.dealias_mask = t.dealias
        self.gamma = params.gamma_array()
        self.diff = np.asarray(params.diffusion)
        self.symbols = [
            [kernel_symbol_half(params.kernels[i, j], grid) for j in range(self.n)]
            for i in range(self.n)
        ]

    def forward(self, u: np.ndarray) -> np.ndarray:
        return rfftn(u, self.dim)

    def inverse(self, u_hat: np.ndarray) -> np.ndarray:
        return irfftn(u_hat, self.grid.shape)

    def drift_arrays(self, u_hat: np.ndarray) -> np.ndarray:
        """Velocity sum_j gamma_ij grad(K_ij * u_j): shape (dim, n, *grid)."""
        conv = np.zeros_like(u_hat)
        for i in range(self.n):
            for j in range(self.n):
                g = self.gamma[i, j]
                if g != 0.0:
                    conv[i] += g * (self.symbols[i][j] * u_hat[j])
        comp_hat = np.stack([ika * conv for ika in self.ik])
        return self.inverse(comp_hat)

    def nonlinear_hat(self, u: np.ndarray, drift: np.ndarray) -> np.ndarray:
        """Transform of div(H(u) * drift), the explicit part of the step."""
        hu = np.maximum(u, 0.0) if self.params.clamp_enabled else u
        flux_hat = self.forward(hu[None, ...] * drift)
        out = np.zeros(u.shape[:1] + self.k2.shape, dtype=complex)
        for axis in range(self.dim):
            out += self.ik[axis] * flux_hat[axis]
        if self.params.dealias:
            out *= self.dealias_mask
        return out

    def heat_factor(self, dt: float) -> np.ndarray:
        shape = (self.n,) + (1,) * self.dim
        return np.exp(-self.diff.reshape(shape) * self.k2 * dt)

    def complete_step(
        self, u: np.ndarray, u_hat: np.ndarray, drift: np.ndarray, dt: float
    ) -> tuple[np.ndarray, np.ndarray]:
        """Advance by dt given the already-evaluated drift at (u, u_hat)."""
        decay = self.heat_factor(dt)
        n1 = self.nonlinear_hat(u, drift)
        if self.scheme == "if-euler":
            u_hat_new = decay * (u_hat + dt * n1)
        else:  # Heun on the integrating-factor variable
            u_hat_pred = decay * (u_hat + dt * n1)
            u_pred = self.inverse(u_hat_pred)
            n2 = self.nonlinear_hat(u_pred, self.drift_arrays(u_hat_pred))
            u_hat_new = decay * u_hat + 0.5 * dt * (decay * n1 + n2)
        return self.inverse(u_hat_new), u_hat_new


def drift_velocity(i: int, fields: list[Field], params: ModelParams) -> list[Field]:
    """Advective velocity felt by species i: sum_j gamma_ij grad(K_ij * u_j)."""
    grid = fields[0].grid
    n = params.n_species
    if len(fields) != n:
        raise ValueError(f"expected {n} fields, got {len(fields)}")
    gamma = params.gamma_array()
    components = [np.zeros(grid.shape) for _ in range(grid.dim)]
    for j in range(n):
        if fields[j].grid != grid:
            raise ValueError("fields live on different grids")
        g = gamma[i, j]
        if g == 0.0:
            continue
        smoothed = convolve(kernel_symbol_half(params.kernels[i, j], grid), fields[j])
        for axis, comp in enumerate(gradient(smoothed)):
            components[axis] += g * comp.values
    return [Field(grid, c) for c in components]


def rhs(state: SimState, params: ModelParams) -> list[Field]:
    """Instantaneous time derivative of every species, assembled spectrally."""
    out = []
    for i, f in enumerate(state.fields):
        f.ensure_finite()
        vel = drift_velocity(i, state.fields, params)
        hu = clamp_h(f) if params.clamp_enabled else f
        flux = [Field(f.grid, hu.values * v.values) for v in vel]
        diff_part = laplacian(f).values * params.diffusion[i]
        out.append(Field(f.grid, diff_part + divergence(flux).values))
    return out


def step_imex(state: SimState, params: ModelParams, dt: float, scheme: str = "if-euler") -> SimState:
    """One integrating-factor step of size dt (public, self-contained)."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    engine = Engine(params, state.grid, scheme)
    u = np.stack([f.values for f in state.fields])
    u_hat = engine.forward(u)
    drift = engine.drift_arrays(u_hat)
    u_new, _ = engine.complete_step(u, u_hat, drift, dt)
    if not np.isfinite(u_new).all():
        raise FloatingPointError("step produced non-finite values (blow-up signal)")
    fields = [Field(state.grid, u_new[i]) for i in range(params.n_species)]
    return SimState(
        t=state.t + dt, fields=fields, dt=dt, step_count=state.step_count + 1
    )


def _materialize(grid, t, u, dt, step_count) -> SimState:
    fields = [Field(grid, u[i].copy()) for i in range(u.shape[0])]
    return SimState(t=t, fields=fields, dt=dt, step_count=step_count)


def run(
    state0: SimState,
    params: ModelParams,
    t_end: float,
    controller: StepController | None = None,
    sinks=(),
    scheme: str = "if-euler",
) -> RunResult:
    """Advance to t_end with adaptive steps, or stop early on blow-up.

    Each sink must expose ``interval`` (sample spacing in simulated time) and
    ``emit(state)``; all sinks fire at the start and at termination, and at
    their own cadence in between.  Early terminations carry a structured
    reason: "ceiling" (magnitude above the controller ceiling), "nonfinite"
    (NaN/Inf appeared), or "dt-underflow" (CFL pushed dt below dt_min).
    """
    controller = controller or StepController()
    grid = state0.grid
    if not t_end > state0.t:
        raise ValueError("t_end must exceed the initial time")
    for f in state0.fields:
        if f.grid != grid:
            raise ValueError("initial fields live on different grids")
        f.ensure_finite()
    engine = Engine(params, grid, scheme)
    if len(state0.fields) != params.n_species:
        raise ValueError("species count mismatch between state and params")
    for sink in sinks:
        if not sink.interval > 0.0:
            raise ValueError("sink intervals must be positive")

    dx_min = min(grid.spacings)
    u = np.stack([f.values for f in state0.fields])
    u_hat = engine.forward(u)
    t = state0.t
    steps = state0.step_count
    dt = state0.dt

    next_due = [state0.t for _ in sinks]
    last_emit = [None for _ in sinks]

    def emit_due() -> None:
        state_cache = None
        for idx, sink in enumerate(sinks):
            eps = 1e-9 * sink.interval
            if t >= next_due[idx] - eps:
                if state_cache is None:
                    state_cache = _materialize(grid, t, u, dt, steps)
                sink.emit(state_cache)
                last_emit[idx] = t
                while next_due[idx] <= t + eps:
                    next_due[idx] += sink.interval

    emit_due()

    termination = None
    while t < t_end:
        drift = engine.drift_arrays(u_hat)
        vmax = float(np.abs(drift).max()) if drift.size else 0.0
        if not math.isfinite(vmax):
            termination = Termination("blowup", "nonfinite", t, steps)
            break
        dt_raw = controller.propose(vmax, dx_min)
        if dt_raw < controller.dt_min:
            dt = dt_raw  # expose the rejected proposal on the terminal state
            termination = Termination("blowup", "dt-underflow", t, steps)
            break
        last = t + dt_raw >= t_end
        dt = t_end - t if last else dt_raw
        u, u_hat = engine.complete_step(u, u_hat, drift, dt)
        steps += 1
        t = t_end if last else t + dt
        if not np.isfinite(u).all():
            termination = Termination("blowup", "nonfinite", t, steps)
            break
        linf = float(np.abs(u).max())
        if linf > controller.linf_ceiling:
            termination = Termination("blowup", "ceiling", t, steps)
            break
        if not last:
            emit_due()

    if termination is None:
        termination = Termination("completed", None, t, steps)
    final_state = _materialize(grid, t, u, dt, steps)
    for idx, sink in enumerate(sinks):
        seen = last_emit[idx]
        if seen is None or t - seen >= 1e-9 * sink.interval:
            sink.emit(final_state)
    return RunResult(state=final_state, termination=termination)
