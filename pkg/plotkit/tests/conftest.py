import struct

import numpy as np
import pytest


def write_grid_bytes(path, values, lx=0.5, ly=0.5, t=0.0, species=1):
    """Hand-rolled writer used to craft fixture files independently."""
    values = np.asarray(values, dtype="<f8")
    nx, ny = values.shape
    header = f"GRIDv1 {nx} {ny} {lx!r} {ly!r} {t!r} {species}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(values.tobytes(order="C"))
    return path


@pytest.fixture(scope="session")
def fig1a_run(tmp_path_factory):
    """A genuine solver run of the fig1a scenario at reduced scale."""
    nlp = pytest.importorskip("nonlocalpop")
    from dataclasses import replace

    from nonlocalpop.presets import preset

    cfg = preset("fig1a")
    cfg = replace(
        cfg,
        grid=replace(cfg.grid, points=(32, 32)),
        time=replace(cfg.time, t_end=1.0, snapshot_every=0.25, series_every=0.1),
    )
    out = tmp_path_factory.mktemp("fig1a_out")
    result = nlp.execute(cfg, out_dir=out)
    assert result.exit_code == 0
    return result.out_dir


@pytest.fixture(scope="session")
def two_species_run(tmp_path_factory):
    """A two-species run for multi-panel rendering."""
    nlp = pytest.importorskip("nonlocalpop")
    from dataclasses import replace

    from nonlocalpop.presets import preset

    cfg = preset("fig1c")
    cfg = replace(
        cfg,
        grid=replace(cfg.grid, points=(32, 32)),
        time=replace(cfg.time, t_end=0.5, snapshot_every=0.25, series_every=0.1),
    )
    out = tmp_path_factory.mktemp("fig1c_out")
    result = nlp.execute(cfg, out_dir=out)
    assert result.exit_code == 0
    return result.out_dir
