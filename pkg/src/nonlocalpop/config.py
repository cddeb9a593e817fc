"""Scenario configuration: TOML schema, validation, emission, builders.

One TOML file describes one run.  Every validation failure names the
offending key, so sweeps fail loudly and precisely.  Emitted configs parse
back to an equal configuration (comments aside).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dynamics import SCHEMES, ModelParams, StepController
from .grid import TorusGrid, make_grid
from .initial import gaussian_bump, perturbed_uniform, plateau_bump
from .kernels import KernelMatrix, KernelSpec

__all__ = [
    "ConfigError",
    "GridConfig",
    "ModelConfig",
    "InitialConfig",
    "TimeConfig",
    "LimitsConfig",
    "OutputConfig",
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "emit_toml",
]

IC_KINDS = ("perturbed-uniform", "bump", "plateau")
OUTPUT_FORMATS = ("csv", "grid")


class ConfigError(ValueError):
    """Configuration parse or validation failure; message names the key."""


@dataclass(frozen=True)
class GridConfig:
    dim: int = 2
    half_lengths: tuple[float, ...] = (0.5, 0.5)
    points: tuple[int, ...] = (128, 128)


@dataclass(frozen=True)
class ModelConfig:
    n_species: int
    diffusion: tuple[float, ...]
    gamma: tuple[tuple[float, ...], ...]
    kernels: tuple[tuple[KernelSpec, ...], ...]
    clamp: bool = True
    dealias: bool = False


@dataclass(frozen=True)
class InitialConfig:
    kind: str = "perturbed-uniform"
    masses: tuple[float, ...] = (1.0,)
    amplitude: float = 0.1
    seed: int = 1234
    smoothing: float = 0.02
    center: tuple[float, ...] | None = None
    width: float = 0.1
    height: float = 1.6
    edge_width: float = 0.06


@dataclass(frozen=True)
class TimeConfig:
    t_end: float = 10.0
    dt_max: float = 1e-2
    dt_min: float = 1e-12
    cfl: float = 0.25
    snapshot_every: float = 1.0
    series_every: float = 0.1
    scheme: str = "if-euler"


@dataclass(frozen=True)
class LimitsConfig:
    linf_ceiling: float = 1e8


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple[str, ...] = ("csv", "grid")


@dataclass(frozen=True)
class ScenarioConfig:
    grid: GridConfig
    model: ModelConfig
    ic: InitialConfig
    time: TimeConfig
    limits: LimitsConfig = LimitsConfig()
    output: OutputConfig = OutputConfig()
    name: str = ""
    comments: tuple[str, ...] = field(default=(), compare=False)

    def build_grid(self) -> TorusGrid:
        return make_grid(self.grid.dim, self.grid.half_lengths, self.grid.points)

    def build_params(self) -> ModelParams:
        return ModelParams(
            diffusion=self.model.diffusion,
            gamma=self.model.gamma,
            kernels=KernelMatrix.from_rows(self.model.kernels),
            clamp_enabled=self.model.clamp,
            dealias=self.model.dealias,
        )

    def build_initial(self, grid: TorusGrid):
        ic = self.ic
        center = ic.center if ic.center is not None else (0.0,) * grid.dim
        if ic.kind == "perturbed-uniform":
            return perturbed_uniform(
                grid, ic.masses, ic.amplitude, ic.seed, ic.smoothing
            )
        if ic.kind == "bump":
            fields = []
            for mass in ic.masses:
                fields.extend(gaussian_bump(grid, center, ic.width, mass))
            return fields
        if ic.kind == "plateau":
            fields = []
            for mass in ic.masses:
                fields.extend(
                    plateau_bump(grid, center, ic.height, ic.edge_width, mass)
                )
            return fields
        raise ConfigError(f"ic.kind: unknown kind {ic.kind!r}")

    def build_controller(self) -> StepController:
        return StepController(
            cfl=self.time.cfl,
            dt_max=self.time.dt_max,
            dt_min=self.time.dt_min,
            linf_ceiling=self.limits.linf_ceiling,
        )

    def config_hash(self) -> str:
        """Digest of the run-defining content (grid/model/ic/time/limits).

        The output block is excluded so the same scenario hashes identically
        no matter where its files land.
        """
        payload = asdict(self)
        payload.pop("comments", None)
        payload.pop("output", None)
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def with_overrides(
        self,
        seed: int | None = None,
        out_dir: str | None = None,
    ) -> "ScenarioConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, ic=replace(cfg.ic, seed=int(seed)))
        if out_dir is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=str(out_dir)))
        return cfg


def _require_table(data: dict, key: str) -> dict:
    if key not in data:
        raise ConfigError(f"{key}: missing required section")
    if not isinstance(data[key], dict):
        raise ConfigError(f"{key}: expected a table")
    return data[key]


def _reject_unknown(table: dict, path: str, allowed) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")


def _get_number(table: dict, key: str, path: str, default=None, positive=False):
    if key not in table:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing required value")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{path}.{key}: must be finite")
    if positive and not value > 0.0:
        raise ConfigError(f"{path}.{key}: must be positive, got {value}")
    return value


def _get_int(table: dict, key: str, path: str, default=None):
    if key not in table:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing required value")
        return default
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return value


def _get_bool(table: dict, key: str, path: str, default: bool) -> bool:
    if key not in table:
        return default
    value = table[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected true/false, got {value!r}")
    return value


def _number_list(table: dict, key: str, path: str, length: int | None = None, default=None):
    if key not in table:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing required list")
        return default
    value = table[key]
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise ConfigError(f"{path}.{key}: expected a list of numbers")
    if length is not None and len(value) != length:
        raise ConfigError(f"{path}.{key}: expected {length} entries, got {len(value)}")
    return tuple(float(v) for v in value)


def _parse_kernel_spec(entry, path: str) -> KernelSpec:
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: expected a kernel table with a 'kind' key")
    allowed = {"kind", "radius", "width"}
    _reject_unknown(entry, path, allowed)
    kind = entry.get("kind")
    if kind not in ("cosine", "tophat", "gaussian", "delta"):
        raise ConfigError(
            f"{path}.kind: expected one of cosine/tophat/gaussian/delta, got {kind!r}"
        )
    radius = entry.get("radius")
    width = entry.get("width")
    try:
        return KernelSpec(
            kind,
            radius=float(radius) if radius is not None else None,
            width=float(width) if width is not None else None,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_grid(data: dict) -> GridConfig:
    table = _require_table(data, "grid")
    _reject_unknown(table, "grid", {"dim", "half_lengths", "points"})
    dim = _get_int(table, "dim", "grid", default=2)
    if dim not in (1, 2):
        raise ConfigError(f"grid.dim: must be 1 or 2, got {dim}")
    defaults = GridConfig()
    half = _number_list(
        table, "half_lengths", "grid", length=dim,
        default=defaults.half_lengths[:dim],
    )
    for L in half:
        if not L > 0.0:
            raise ConfigError(f"grid.half_lengths: entries must be positive, got {L}")
    pts_raw = table.get("points", list(defaults.points[:dim]))
    if not isinstance(pts_raw, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in pts_raw
    ):
        raise ConfigError("grid.points: expected a list of integers")
    if len(pts_raw) != dim:
        raise ConfigError(f"grid.points: expected {dim} entries, got {len(pts_raw)}")
    for n in pts_raw:
        if n < 8 or n % 2 != 0:
            raise ConfigError(f"grid.points: counts must be even and >= 8, got {n}")
    return GridConfig(dim=dim, half_lengths=half, points=tuple(pts_raw))


def _parse_model(data: dict, grid: GridConfig) -> ModelConfig:
    table = _require_table(data, "model")
    _reject_unknown(
        table,
        "model",
        {"n_species", "diffusion", "gamma", "kernel", "kernels", "clamp", "dealias"},
    )
    n = _get_int(table, "n_species", "model")
    if n < 1:
        raise ConfigError(f"model.n_species: must be >= 1, got {n}")
    diffusion = _number_list(table, "diffusion", "model", length=n)
    for d in diffusion:
        if not d > 0.0:
            raise ConfigError(f"model.diffusion: entries must be positive, got {d}")
    gamma_raw = table.get("gamma")
    if not isinstance(gamma_raw, list) or len(gamma_raw) != n:
        raise ConfigError(f"model.gamma: expected an {n} x {n} matrix")
    gamma = []
    for i, row in enumerate(gamma_raw):
        if not isinstance(row, list) or len(row) != n:
            raise ConfigError(
                f"model.gamma: row {i} must have {n} entries "
                f"(got {len(row) if isinstance(row, list) else type(row).__name__})"
            )
        for g in row:
            if isinstance(g, bool) or not isinstance(g, (int, float)):
                raise ConfigError(f"model.gamma: entries must be numbers, got {g!r}")
            if not math.isfinite(float(g)):
                raise ConfigError("model.gamma: entries must be finite")
        gamma.append(tuple(float(g) for g in row))

    if "kernel" in table and "kernels" in table:
        raise ConfigError("model.kernel: give either 'kernel' or 'kernels', not both")
    if "kernel" in table:
        spec = _parse_kernel_spec(table["kernel"], "model.kernel")
        kernels = tuple((spec,) * n for _ in range(n))
    elif "kernels" in table:
        rows = table["kernels"]
        if not isinstance(rows, list) or len(rows) != n:
            raise ConfigError(f"model.kernels: expected {n} rows")
        kernels = []
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise ConfigError(f"model.kernels: row {i} must have {n} entries")
            kernels.append(
                tuple(
                    _parse_kernel_spec(entry, f"model.kernels[{i}][{j}]")
                    for j, entry in enumerate(row)
                )
            )
        kernels = tuple(kernels)
    else:
        raise ConfigError("model.kernel: missing kernel table")

    min_half = min(grid.half_lengths)
    for i, row in enumerate(kernels):
        for j, spec in enumerate(row):
            scale = spec.length_scale
            if scale is not None and scale >= min_half:
                raise ConfigError(
                    f"model.kernels[{i}][{j}]: scale {scale} must be smaller than "
                    f"the smallest half-length {min_half}"
                )
    return ModelConfig(
        n_species=n,
        diffusion=diffusion,
        gamma=tuple(gamma),
        kernels=kernels,
        clamp=_get_bool(table, "clamp", "model", True),
        dealias=_get_bool(table, "dealias", "model", False),
    )


def _parse_ic(data: dict, n: int, grid: GridConfig) -> InitialConfig:
    defaults = InitialConfig()
    table = data.get("ic", {})
    if not isinstance(table, dict):
        raise ConfigError("ic: expected a table")
    _reject_unknown(
        table,
        "ic",
        {"kind", "masses", "amplitude", "seed", "smoothing", "center", "width",
         "height", "edge_width"},
    )
    kind = table.get("kind", defaults.kind)
    if kind not in IC_KINDS:
        raise ConfigError(f"ic.kind: expected one of {IC_KINDS}, got {kind!r}")
    masses = _number_list(table, "masses", "ic", length=n, default=(1.0,) * n)
    for m in masses:
        if not m > 0.0:
            raise ConfigError(f"ic.masses: entries must be positive, got {m}")
    center = None
    if "center" in table:
        center = _number_list(table, "center", "ic", length=grid.dim)
        for c, L in zip(center, grid.half_lengths):
            if not (-L <= c < L):
                raise ConfigError(f"ic.center: component {c} outside [-{L}, {L})")
    return InitialConfig(
        kind=kind,
        masses=masses,
        amplitude=_get_number(table, "amplitude", "ic", default=defaults.amplitude),
        seed=_get_int(table, "seed", "ic", default=defaults.seed),
        smoothing=_get_number(table, "smoothing", "ic", default=defaults.smoothing),
        center=center,
        width=_get_number(table, "width", "ic", default=defaults.width, positive=True),
        height=_get_number(table, "height", "ic", default=defaults.height, positive=True),
        edge_width=_get_number(
            table, "edge_width", "ic", default=defaults.edge_width, positive=True
        ),
    )


def _parse_time(data: dict) -> TimeConfig:
    defaults = TimeConfig()
    table = data.get("time", {})
    if not isinstance(table, dict):
        raise ConfigError("time: expected a table")
    _reject_unknown(
        table,
        "time",
        {"t_end", "dt_max", "dt_min", "cfl", "snapshot_every", "series_every", "scheme"},
    )
    scheme = table.get("scheme", defaults.scheme)
    if scheme not in SCHEMES:
        raise ConfigError(f"time.scheme: expected one of {SCHEMES}, got {scheme!r}")
    cfg = TimeConfig(
        t_end=_get_number(table, "t_end", "time", default=defaults.t_end, positive=True),
        dt_max=_get_number(table, "dt_max", "time", default=defaults.dt_max, positive=True),
        dt_min=_get_number(table, "dt_min", "time", default=defaults.dt_min, positive=True),
        cfl=_get_number(table, "cfl", "time", default=defaults.cfl, positive=True),
        snapshot_every=_get_number(
            table, "snapshot_every", "time", default=defaults.snapshot_every, positive=True
        ),
        series_every=_get_number(
            table, "series_every", "time", default=defaults.series_every, positive=True
        ),
        scheme=scheme,
    )
    if not cfg.dt_min < cfg.dt_max:
        raise ConfigError(f"time.dt_min: must be below dt_max, got {cfg.dt_min} >= {cfg.dt_max}")
    return cfg


def _parse_limits(data: dict) -> LimitsConfig:
    defaults = LimitsConfig()
    table = data.get("limits", {})
    if not isinstance(table, dict):
        raise ConfigError("limits: expected a table")
    _reject_unknown(table, "limits", {"linf_ceiling"})
    return LimitsConfig(
        linf_ceiling=_get_number(
            table, "linf_ceiling", "limits", default=defaults.linf_ceiling, positive=True
        )
    )


def _parse_output(data: dict) -> OutputConfig:
    defaults = OutputConfig()
    table = data.get("output", {})
    if not isinstance(table, dict):
        raise ConfigError("output: expected a table")
    _reject_unknown(table, "output", {"directory", "formats"})
    directory = table.get("directory", defaults.directory)
    if not isinstance(directory, str) or not directory:
        raise ConfigError("output.directory: expected a non-empty string")
    formats = table.get("formats", list(defaults.formats))
    if not isinstance(formats, list) or any(not isinstance(f, str) for f in formats):
        raise ConfigError("output.formats: expected a list of strings")
    for f in formats:
        if f not in OUTPUT_FORMATS:
            raise ConfigError(
                f"output.formats: unknown format {f!r}; choose from {OUTPUT_FORMATS}"
            )
    return OutputConfig(directory=directory, formats=tuple(formats))


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario written in TOML."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error: {exc}") from exc
    _reject_unknown(
        data, "config", {"name", "grid", "model", "ic", "time", "limits", "output"}
    )
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("name: expected a string")
    grid = _parse_grid(data)
    model = _parse_model(data, grid)
    ic = _parse_ic(data, model.n_species, grid)
    return ScenarioConfig(
        grid=grid,
        model=model,
        ic=ic,
        time=_parse_time(data),
        limits=_parse_limits(data),
        output=_parse_output(data),
        name=name,
    )


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot format {value!r}")


def _fmt_kernel(spec: KernelSpec) -> str:
    parts = [f'kind = "{spec.kind}"']
    if spec.radius is not None:
        parts.append(f"radius = {spec.radius!r}")
    if spec.width is not None:
        parts.append(f"width = {spec.width!r}")
    return "{ " + ", ".join(parts) + " }"


def emit_toml(config: ScenarioConfig) -> str:
    """Render a configuration as TOML, comments first."""
    lines: list[str] = []
    for comment in config.comments:
        lines.append(f"# {comment}")
    if config.comments:
        lines.append("")
    if config.name:
        lines.append(f"name = {_fmt(config.name)}")
        lines.append("")

    g = config.grid
    lines.append("[grid]")
    lines.append(f"dim = {g.dim}")
    lines.append(f"half_lengths = [{', '.join(repr(x) for x in g.half_lengths)}]")
    lines.append(f"points = [{', '.join(str(n) for n in g.points)}]")
    lines.append("")

    m = config.model
    lines.append("[model]")
    lines.append(f"n_species = {m.n_species}")
    lines.append(f"diffusion = [{', '.join(repr(x) for x in m.diffusion)}]")
    rows = ", ".join(
        "[" + ", ".join(repr(x) for x in row) + "]" for row in m.gamma
    )
    lines.append(f"gamma = [{rows}]")
    uniform = all(spec == m.kernels[0][0] for row in m.kernels for spec in row)
    if uniform:
        lines.append(f"kernel = {_fmt_kernel(m.kernels[0][0])}")
    else:
        krows = ", ".join(
            "[" + ", ".join(_fmt_kernel(spec) for spec in row) + "]"
            for row in m.kernels
        )
        lines.append(f"kernels = [{krows}]")
    lines.append(f"clamp = {_fmt(m.clamp)}")
    lines.append(f"dealias = {_fmt(m.dealias)}")
    lines.append("")

    ic = config.ic
    lines.append("[ic]")
    lines.append(f'kind = "{ic.kind}"')
    lines.append(f"masses = [{', '.join(repr(x) for x in ic.masses)}]")
    lines.append(f"amplitude = {ic.amplitude!r}")
    lines.append(f"seed = {ic.seed}")
    lines.append(f"smoothing = {ic.smoothing!r}")
    if ic.center is not None:
        lines.append(f"center = [{', '.join(repr(x) for x in ic.center)}]")
    lines.append(f"width = {ic.width!r}")
    lines.append(f"height = {ic.height!r}")
    lines.append(f"edge_width = {ic.edge_width!r}")
    lines.append("")

    t = config.time
    lines.append("[time]")
    lines.append(f"t_end = {t.t_end!r}")
    lines.append(f"dt_max = {t.dt_max!r}")
    lines.append(f"dt_min = {t.dt_min!r}")
    lines.append(f"cfl = {t.cfl!r}")
    lines.append(f"snapshot_every = {t.snapshot_every!r}")
    lines.append(f"series_every = {t.series_every!r}")
    lines.append(f'scheme = "{t.scheme}"')
    lines.append("")

    lines.append("[limits]")
    lines.append(f"linf_ceiling = {config.limits.linf_ceiling!r}")
    lines.append("")

    lines.append("[output]")
    lines.append(f"directory = {_fmt(config.output.directory)}")
    lines.append(
        "formats = [" + ", ".join(json.dumps(f) for f in config.output.formats) + "]"
    )
    lines.append("")
    return "\n".join(lines)
