"""Runtime measurements and the finite-time collapse calculus.

Per-snapshot quantities: species masses, extrema, L2/Linf norms, the
negative-part L2 norm (a Lyapunov quantity under pure diffusion), periodic
centers of mass, and a recentred second moment.  For purely local (delta
kernel) models with the right coupling sign pattern the module also supplies
the critical coupling strengths below which the second moment is forced to
decrease -- the operational signature of finite-time concentration -- and
the corresponding bound on dM/dt.

Everything here is a pure function of immutable snapshot copies, safe to
evaluate concurrently with the solver thread.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import ModelParams, SimState, StepController
from .grid import Field

__all__ = [
    "DiagnosticsRecord",
    "BlowupVerdict",
    "Case2Condition",
    "MassPreconditionError",
    "total_mass",
    "periodic_center_of_mass",
    "second_moment",
    "case1_threshold",
    "case2_threshold",
    "case2_condition",
    "moment_bound",
    "classify_coupling_case",
    "assess_blowup",
    "run_moment_bound",
    "compute_record",
    "BlowupDetector",
    "centered_slopes",
]


class MassPreconditionError(ValueError):
    """Raised when a collapse threshold is requested below its mass floor."""


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One sample of the run diagnostics (all norms in continuum scaling)."""

    t: float
    mass: tuple[float, ...]
    minimum: tuple[float, ...]
    maximum: tuple[float, ...]
    l2: tuple[float, ...]
    linf: tuple[float, ...]
    neg_l2: tuple[float, ...]
    second_moment: float
    com: tuple[tuple[float, ...], ...]
    com_degenerate: tuple[bool, ...]
    dmdt_bound: float

    @property
    def total(self) -> float:
        return float(sum(self.mass))


def total_mass(fields: list[Field]) -> tuple[tuple[float, ...], float]:
    """Per-species masses and their sum P."""
    per = tuple(
        float(np.sum(f.values)) * f.grid.cell_volume for f in fields
    )
    return per, float(sum(per))


def periodic_center_of_mass(f: Field) -> tuple[np.ndarray, bool]:
    """Mass-weighted circular mean position, one angle per dimension.

    Returns (position, degenerate).  A uniform field has no preferred point;
    it comes back as the origin with the degenerate flag set.  Centering this
    way keeps the aggregate far from the identification seam no matter where
    it forms.
    """
    vals = f.values
    total_abs = float(np.sum(np.abs(vals)))
    mass = float(np.sum(vals))
    if not mass > 0.0:
        raise ValueError(f"center of mass needs positive mass, got {mass * f.grid.cell_volume}")
    position = np.zeros(f.grid.dim)
    degenerate = False
    for axis, coords in enumerate(f.grid.coordinates()):
        L = f.grid.half_lengths[axis]
        theta = math.pi * coords / L
        shape = [1] * f.grid.dim
        shape[axis] = coords.size
        sin_sum = float(np.sum(vals * np.sin(theta).reshape(shape)))
        cos_sum = float(np.sum(vals * np.cos(theta).reshape(shape)))
        if math.hypot(sin_sum, cos_sum) <= 1e-12 * max(total_abs, 1e-300):
            degenerate = True
            continue
        angle = math.atan2(sin_sum, cos_sum)
        pos = L * angle / math.pi
        if pos >= L:  # atan2 returns (-pi, pi]; fold the seam representative
            pos = -L
        position[axis] = pos
    return position, degenerate


def second_moment(fields: list[Field], center) -> float:
    """Mass-weighted mean squared torus distance from ``center``, summed over
    species.  Distances use the minimum-image displacement per axis."""
    grid = fields[0].grid
    center = np.asarray(center, dtype=float)
    if center.shape != (grid.dim,):
        raise ValueError(f"center must have {grid.dim} components")
    dist2 = np.zeros(grid.shape)
    for axis, coords in enumerate(grid.coordinates()):
        d = grid.wrap(coords - center[axis], axis)
        shape = [1] * grid.dim
        shape[axis] = coords.size
        dist2 = dist2 + (d.reshape(shape)) ** 2
    acc = 0.0
    for f in fields:
        if f.grid != grid:
            raise ValueError("fields live on different grids")
        acc += float(np.sum(dist2 * f.values))
    return acc * grid.cell_volume


def case1_threshold(total_mass_p: float, d_max: float, torus_volume: float) -> float:
    """Critical coupling for the all-attractive local model.

    Valid when P > |T|/2; collapse is guaranteed when the largest coupling
    entry lies below the returned value.
    """
    if not total_mass_p > torus_volume / 2.0:
        raise MassPreconditionError(
            f"case 1 needs total mass P > |T|/2 = {torus_volume / 2.0}, got P = {total_mass_p}"
        )
    return -2.0 * total_mass_p * d_max / (2.0 * total_mass_p - torus_volume)


def case2_threshold(
    total_mass_p: float, d_max: float, torus_volume: float, n_species: int
) -> float:
    """Critical self-coupling for self-attractive, mutually avoiding species.

    Valid when P > N |T|/2; applies to the largest diagonal coupling.
    """
    if not total_mass_p > n_species * torus_volume / 2.0:
        raise MassPreconditionError(
            f"case 2 needs total mass P > N |T|/2 = {n_species * torus_volume / 2.0}, "
            f"got P = {total_mass_p}"
        )
    return -4.0 * total_mass_p * d_max / (2.0 * total_mass_p - n_species * torus_volume)


@dataclass(frozen=True)
class Case2Condition:
    """Structural sign checks for the self-attraction/mutual-avoidance regime."""

    per_species: tuple[bool, ...]  # sum_{j != i} (g_ij + g_ji) < -g_ii
    holds: bool
    diagonal_negative: tuple[bool, ...]
    offdiagonal_nonnegative: bool


def case2_condition(gamma) -> Case2Condition:
    g = np.asarray(gamma, dtype=float)
    n = g.shape[0]
    if g.shape != (n, n):
        raise ValueError("gamma must be square")
    per = []
    for i in range(n):
        cross = float(sum(g[i, j] + g[j, i] for j in range(n) if j != i))
        per.append(cross < -g[i, i])
    diag_neg = tuple(bool(g[i, i] < 0.0) for i in range(n))
    offdiag_ok = all(
        g[i, j] >= 0.0 for i in range(n) for j in range(n) if i != j
    )
    return Case2Condition(
        per_species=tuple(per),
        holds=all(per),
        diagonal_negative=diag_neg,
        offdiagonal_nonnegative=bool(offdiag_ok),
    )


def moment_bound(
    case_id: str,
    total_mass_p: float,
    d_max: float,
    gamma_value: float,
    torus_volume: float,
    dim: int,
    n_species: int | None = None,
) -> float:
    """Upper bound on dM/dt for the local model in the given regime.

    case1: 2 D n P + gamma n (2P - |T|), with gamma the largest entry.
    case2: 2 D n P + gamma n (P - N |T| / 2), with gamma the largest diagonal.
    A negative bound forces the second moment to zero in finite time.
    """
    base = 2.0 * d_max * dim * total_mass_p
    if case_id == "case1":
        return base + gamma_value * dim * (2.0 * total_mass_p - torus_volume)
    if case_id == "case2":
        if n_species is None:
            raise ValueError("case2 bound needs the species count")
        return base + gamma_value * dim * (total_mass_p - n_species * torus_volume / 2.0)
    raise ValueError(f"unknown case_id {case_id!r}")


def classify_coupling_case(gamma) -> str | None:
    """Which collapse regime a coupling matrix falls into, if any.

    "case1": every entry negative (mutual and self attraction).
    "case2": negative diagonal, nonnegative off-diagonal.
    None otherwise (mixed signs outside both analysed regimes).
    """
    g = np.asarray(gamma, dtype=float)
    if np.all(g < 0.0):
        return "case1"
    n = g.shape[0]
    diag_neg = all(g[i, i] < 0.0 for i in range(n))
    off_nonneg = all(g[i, j] >= 0.0 for i in range(n) for j in range(n) if i != j)
    if diag_neg and off_nonneg:
        return "case2"
    return None


@dataclass(frozen=True)
class BlowupVerdict:
    """Threshold comparison for a concrete model and initial mass."""

    case_id: str
    total_mass: float
    gamma_star: float | None  # None when the mass precondition fails
    supercritical: bool
    condition_holds: bool  # case-2 structural condition (vacuous for case 1)


def assess_blowup(gamma, total_mass_p: float, d_max: float, torus_volume: float) -> BlowupVerdict | None:
    """Classify the coupling matrix and compare against its threshold."""
    g = np.asarray(gamma, dtype=float)
    case_id = classify_coupling_case(g)
    if case_id is None:
        return None
    n = g.shape[0]
    if case_id == "case1":
        gamma_rel = float(g.max())
        condition = True
        try:
            gamma_star = case1_threshold(total_mass_p, d_max, torus_volume)
        except MassPreconditionError:
            gamma_star = None
    else:
        gamma_rel = float(max(g[i, i] for i in range(n)))
        condition = case2_condition(g).holds
        try:
            gamma_star = case2_threshold(total_mass_p, d_max, torus_volume, n)
        except MassPreconditionError:
            gamma_star = None
    supercritical = gamma_star is not None and gamma_rel < gamma_star
    return BlowupVerdict(
        case_id=case_id,
        total_mass=total_mass_p,
        gamma_star=gamma_star,
        supercritical=supercritical,
        condition_holds=condition,
    )


def run_moment_bound(params: ModelParams, fields: list[Field]) -> float:
    """dM/dt bound for a run, or NaN when the regime calculus does not apply.

    The bound is derived for the purely local model, so it is only reported
    when every kernel is the delta and the coupling signs match one of the
    analysed regimes with its mass precondition satisfied.
    """
    grid = fields[0].grid
    all_delta = all(
        params.kernels[i, j].is_delta
        for i in range(params.n_species)
        for j in range(params.n_species)
    )
    if not all_delta:
        return float("nan")
    g = params.gamma_array()
    case_id = classify_coupling_case(g)
    if case_id is None:
        return float("nan")
    _, p = total_mass(fields)
    d_max = max(params.diffusion)
    if case_id == "case1":
        gamma_rel = float(g.max())
    else:
        gamma_rel = float(max(g[i, i] for i in range(params.n_species)))
    try:
        if case_id == "case1":
            case1_threshold(p, d_max, grid.volume)
        else:
            case2_threshold(p, d_max, grid.volume, params.n_species)
    except MassPreconditionError:
        return float("nan")
    return moment_bound(
        case_id, p, d_max, gamma_rel, grid.volume, grid.dim, params.n_species
    )


def compute_record(state: SimState, dmdt_bound: float = float("nan")) -> DiagnosticsRecord:
    """Snapshot diagnostics; tolerates non-finite blow-up frames (NaNs pass
    through into the record rather than raising)."""
    grid = state.grid
    cell = grid.cell_volume
    masses, minima, maxima, l2s, linfs, negs = [], [], [], [], [], []
    coms, degs = [], []
    for f in state.fields:
        v = f.values
        masses.append(float(np.sum(v)) * cell)
        minima.append(float(np.min(v)))
        maxima.append(float(np.max(v)))
        l2s.append(float(math.sqrt(max(float(np.sum(v * v)) * cell, 0.0))))
        linfs.append(float(np.max(np.abs(v))))
        neg = np.minimum(v, 0.0)
        negs.append(float(math.sqrt(max(float(np.sum(neg * neg)) * cell, 0.0))))
        try:
            com, deg = periodic_center_of_mass(f)
        except ValueError:
            com, deg = np.full(grid.dim, float("nan")), True
        coms.append(tuple(float(c) for c in com))
        degs.append(bool(deg))
    finite = all(math.isfinite(m) for m in masses)
    if finite:
        totals = Field(grid, sum(f.values for f in state.fields))
        try:
            center, _ = periodic_center_of_mass(totals)
        except ValueError:
            center = np.zeros(grid.dim)
        m2 = second_moment(state.fields, center)
    else:
        m2 = float("nan")
    return DiagnosticsRecord(
        t=state.t,
        mass=tuple(masses),
        minimum=tuple(minima),
        maximum=tuple(maxima),
        l2=tuple(l2s),
        linf=tuple(linfs),
        neg_l2=tuple(negs),
        second_moment=m2,
        com=tuple(coms),
        com_degenerate=tuple(degs),
        dmdt_bound=dmdt_bound,
    )


class BlowupDetector:
    """Run observer mirroring the discrete blow-up proxies.

    Collects (t, second moment, steepening) samples and records an event
    whenever a state trips the ceiling, carries non-finite values, or was
    reached with a step size at the underflow floor.  The steepening metric
    max_i ||u_i||_inf / mean_i tracks how far profiles are from uniform.
    """

    def __init__(
        self,
        controller: StepController | None = None,
        interval: float = 0.1,
        dmdt_bound: float = float("nan"),
    ):
        self.controller = controller or StepController()
        self.interval = interval
        self.dmdt_bound = dmdt_bound
        self.times: list[float] = []
        self.moments: list[float] = []
        self.steepening: list[float] = []
        self.events: list[tuple[float, str]] = []

    def emit(self, state: SimState) -> None:
        record = compute_record(state, self.dmdt_bound)
        volume = state.grid.volume
        steep = 0.0
        for mass, linf in zip(record.mass, record.linf):
            mean = mass / volume
            if mean > 0.0 and math.isfinite(linf):
                steep = max(steep, linf / mean)
        self.times.append(state.t)
        self.moments.append(record.second_moment)
        self.steepening.append(steep)
        if any(not math.isfinite(m) for m in record.mass):
            self.events.append((state.t, "nonfinite"))
        elif max(record.linf) > self.controller.linf_ceiling:
            self.events.append((state.t, "ceiling"))
        elif 0.0 < state.dt < self.controller.dt_min:
            self.events.append((state.t, "dt-underflow"))

    @property
    def flagged(self) -> bool:
        return bool(self.events)

    def moment_slopes(self) -> tuple[np.ndarray, np.ndarray]:
        """Centered finite-difference slopes of M(t) at interior samples."""
        return centered_slopes(np.asarray(self.times), np.asarray(self.moments))


def centered_slopes(ts: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(sample times, slopes) of centered differences over a sampled signal."""
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    if ts.size < 3:
        return ts[1:0], np.zeros(0)
    dt = ts[2:] - ts[:-2]
    slopes = (values[2:] - values[:-2]) / dt
    return ts[1:-1], slopes
