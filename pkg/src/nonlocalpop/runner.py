"""Run orchestration: config in, files out, structured result back.

One process executes one run; the ``threads`` knob only controls
intra-transform parallelism.  All file writes are single-writer.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import ScenarioConfig
from .diagnostics import run_moment_bound
from .dynamics import SimState, Termination, run
from .runio import SeriesSink, SnapshotSink, write_manifest
from .spectral import set_fft_workers

__all__ = ["ExecutionResult", "execute"]


@dataclass
class ExecutionResult:
    config: ScenarioConfig
    out_dir: Path
    state: SimState
    termination: Termination
    manifest: dict

    @property
    def exit_code(self) -> int:
        return 3 if self.termination.is_blowup else 0


def execute(
    config: ScenarioConfig,
    out_dir=None,
    seed: int | None = None,
    threads: int | None = None,
) -> ExecutionResult:
    """Run one scenario and write its output files.

    ``seed`` and ``out_dir`` override the corresponding config entries; the
    manifest records the hash of the configuration actually run.
    """
    cfg = config.with_overrides(seed=seed, out_dir=str(out_dir) if out_dir else None)
    if threads is not None:
        set_fft_workers(threads)

    grid = cfg.build_grid()
    params = cfg.build_params()
    fields = cfg.build_initial(grid)
    controller = cfg.build_controller()
    state0 = SimState(t=0.0, fields=fields)
    bound = run_moment_bound(params, fields)

    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)

    sinks = []
    series = None
    snapshots = None
    if "csv" in cfg.output.formats:
        series = SeriesSink(out / "series.csv", cfg.time.series_every, bound)
        sinks.append(series)
    if "grid" in cfg.output.formats:
        snapshots = SnapshotSink(out, cfg.time.snapshot_every)
        sinks.append(snapshots)

    started = datetime.now(timezone.utc).isoformat()
    try:
        result = run(
            state0,
            params,
            cfg.time.t_end,
            controller=controller,
            sinks=sinks,
            scheme=cfg.time.scheme,
        )
    finally:
        if series is not None:
            series.close()
    finished = datetime.now(timezone.utc).isoformat()

    files = []
    if series is not None:
        files.append("series.csv")
    if snapshots is not None:
        files.extend(snapshots.files)
    manifest = write_manifest(
        out / "manifest.json",
        config_hash=cfg.config_hash(),
        version=__version__,
        started_at=started,
        finished_at=finished,
        t_final=result.termination.t,
        termination=result.termination.label,
        files=files,
    )
    return ExecutionResult(
        config=cfg,
        out_dir=out,
        state=result.state,
        termination=result.termination,
        manifest=manifest,
    )
