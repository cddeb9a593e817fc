"""Heatmap rendering of field snapshots.

Panels are drawn with domain-true aspect and a colorbar; multi-species
figures share one color scale by default so panels stay comparable.
Rendering never mutates the input handles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .snapshots import SnapshotHandle

__all__ = ["HeatmapStyle", "shared_range", "render_heatmap", "render_panels"]


@dataclass(frozen=True)
class HeatmapStyle:
    cmap: str = "viridis"
    dpi: int = 130
    vmin: float | None = None
    vmax: float | None = None


def _finite_range(values: np.ndarray) -> tuple[float, float]:
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return 0.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if lo == hi:  # flat field: widen so the colorbar has a range to draw
        pad = max(abs(lo) * 1e-6, 1e-12)
        return lo - pad, hi + pad
    return lo, hi


def shared_range(handles) -> tuple[float, float]:
    """Common color range across several snapshots."""
    lo = math.inf
    hi = -math.inf
    for h in handles:
        a, b = _finite_range(h.values)
        lo = min(lo, a)
        hi = max(hi, b)
    if not (lo < hi):
        lo, hi = lo - 1e-12, hi + 1e-12
    return lo, hi


def _panel_title(handle: SnapshotHandle) -> str:
    return f"u{handle.species}, t={handle.t:.6g}"


def _draw_panel(ax, handle: SnapshotHandle, style: HeatmapStyle, vmin, vmax):
    if handle.is_one_dimensional:
        x = np.linspace(-handle.lx, handle.lx, handle.nx, endpoint=False)
        ax.plot(x, handle.values[:, 0])
        ax.set_xlabel("x")
        ax.set_ylabel("density")
        ax.set_title(_panel_title(handle))
        return None
    img = ax.imshow(
        handle.values.T,
        origin="lower",
        extent=(-handle.lx, handle.lx, -handle.ly, handle.ly),
        aspect="equal",
        cmap=style.cmap,
        vmin=vmin,
        vmax=vmax,
    )
    title = _panel_title(handle)
    if not handle.finite:
        title += " [non-finite frame]"
    ax.set_title(title)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    return img


def render_heatmap(handle: SnapshotHandle, out_path, style: HeatmapStyle | None = None) -> Path:
    """Render one snapshot to a PNG and return its path."""
    style = style or HeatmapStyle()
    vmin, vmax = style.vmin, style.vmax
    if vmin is None or vmax is None:
        lo, hi = _finite_range(handle.values)
        vmin = lo if vmin is None else vmin
        vmax = hi if vmax is None else vmax
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    img = _draw_panel(ax, handle, style, vmin, vmax)
    if img is not None:
        fig.colorbar(img, ax=ax, shrink=0.85)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=style.dpi)
    plt.close(fig)
    return out_path


def render_panels(
    handles,
    out_path,
    style: HeatmapStyle | None = None,
    share_scale: bool = True,
) -> Path:
    """Render several species' snapshots side by side in one figure."""
    handles = list(handles)
    if not handles:
        raise ValueError("no snapshots to render")
    style = style or HeatmapStyle()
    if share_scale:
        vmin, vmax = shared_range(handles)
    fig, axes = plt.subplots(
        1, len(handles), figsize=(4.2 * len(handles), 4.0), squeeze=False
    )
    last_img = None
    for ax, handle in zip(axes[0], handles):
        if not share_scale:
            vmin, vmax = _finite_range(handle.values)
        img = _draw_panel(ax, handle, style, vmin, vmax)
        last_img = img if img is not None else last_img
    if last_img is not None:
        fig.colorbar(last_img, ax=list(axes[0]), shrink=0.85)
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=style.dpi)
    plt.close(fig)
    return out_path
