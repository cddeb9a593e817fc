"""Acceptance for the plotting companion: it must consume the solver's real
outputs -- every snapshot renders, the series plots, and the loader is
bit-exact against the files the solver wrote."""

import numpy as np

from plotkit import load_snapshot, render_heatmap, render_series, scan_run_directory


def test_plot_pipeline_on_solver_outputs(fig1a_run, tmp_path):
    found = scan_run_directory(fig1a_run)
    assert found, "solver run produced no snapshots"

    rendered = 0
    for species, entries in found.items():
        for step, path in entries:
            handle = load_snapshot(path)
            # bit-exact round trip against the bytes the solver wrote
            payload = path.read_bytes().split(b"\n", 1)[1]
            assert handle.values.tobytes() == payload
            assert np.isfinite(handle.values).all()
            out = tmp_path / f"u{species}_{step:06d}.png"
            render_heatmap(handle, out)
            assert out.exists()
            rendered += 1

    series_png = tmp_path / "series.png"
    render_series(fig1a_run / "series.csv", ["mass", "linf", "M"], series_png)
    assert series_png.exists()
    print(
        f"ACCEPTANCE PASS: plot pipeline ({rendered} heatmaps, series plot, "
        "bit-exact snapshot round-trip)"
    )
