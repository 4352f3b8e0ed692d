"""Figure renderers.

All renderers are read-only over their inputs and deterministic for fixed
inputs, so re-rendering a figure reproduces the same image bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .io import (
    InputError,
    drive_period,
    region_columns,
    region_site_ranges,
    site_columns,
)

_PNG_METADATA = {"Software": "figkit"}


def _save(fig, out_path) -> None:
    fig.savefig(out_path, dpi=150, metadata=_PNG_METADATA)
    plt.close(fig)


def render_curves(curves: pd.DataFrame, out_path,
                  winding: pd.DataFrame | None = None) -> None:
    """Per-trimer detuning curves, one panel each, origin marked in red."""
    keys = sorted({(int(mu), int(r)) for mu, r in zip(curves["mu"], curves["r"])})
    ncols = min(len(keys), 4)
    nrows = math.ceil(len(keys) / ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.0 * ncols, 3.0 * nrows),
                             squeeze=False)
    labels = {}
    if winding is not None:
        for row in winding.itertuples():
            labels[(int(row.mu), int(row.r))] = int(row.winding)
    for ax, (mu, r) in zip(axes.flat, keys):
        sel = curves[(curves["mu"] == mu) & (curves["r"] == r)]
        ax.plot(sel["gamma_ab"], sel["gamma_ac"], lw=1.0, color="tab:blue")
        ax.plot([0.0], [0.0], "o", color="red", ms=4)
        title = f"chain {mu}, trimer {r}"
        if (mu, r) in labels:
            title += f", w={labels[(mu, r)]}"
        ax.set_title(title, fontsize=9)
        ax.set_xlabel(r"$\gamma^{AB}$", fontsize=8)
        ax.set_ylabel(r"$\gamma^{AC}$", fontsize=8)
        ax.set_aspect("equal", adjustable="datalim")
        ax.tick_params(labelsize=7)
    for ax in axes.flat[len(keys):]:
        ax.set_visible(False)
    fig.tight_layout()
    _save(fig, out_path)


def render_winding_panel(winding: pd.DataFrame, out_path) -> None:
    """Winding number per trimer as a stem panel, protected trimers in green."""
    frame = winding.sort_values(["mu", "r"]).reset_index(drop=True)
    ticks = [f"{int(mu)}.{int(r)}" for mu, r in zip(frame["mu"], frame["r"])]
    colors = ["tab:green" if ok else "tab:red" for ok in frame["certificate"]]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(frame)), 3.0))
    ax.bar(range(len(frame)), frame["winding"], color=colors)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xticks(range(len(frame)))
    ax.set_xticklabels(ticks, fontsize=7)
    ax.set_xlabel("chain.trimer")
    ax.set_ylabel("winding number")
    ax.set_yticks(sorted({int(w) for w in frame["winding"]} | {0}))
    fig.tight_layout()
    _save(fig, out_path)


def front_positions(trajectory: pd.DataFrame, period: float) -> np.ndarray:
    """Population-weighted mean flat site index at each period boundary.

    Used as the transport-front diagnostic: for a pump with positive Chern
    number the front must not retreat across period boundaries.
    """
    cols = site_columns(trajectory)
    sites = np.array([int(c.split("_")[1]) for c in cols], dtype=float)
    pops = trajectory[cols].to_numpy()
    times = trajectory["t"].to_numpy()
    n_periods = int(round(times[-1] / period))
    positions = []
    for p in range(n_periods + 1):
        idx = int(np.argmin(np.abs(times - p * period)))
        weights = pops[idx]
        positions.append(float(weights @ sites / weights.sum()))
    return np.asarray(positions)


def render_heatmap(trajectory: pd.DataFrame, manifest: dict, out_path) -> None:
    """Site-population density over (time in periods, flat site index).

    Region spans from the manifest are overlaid as boxes.  Asserts on the data
    that the population front advances monotonically across period boundaries.
    """
    period = drive_period(manifest)
    fronts = front_positions(trajectory, period)
    if np.any(np.diff(fronts) < -1e-9):
        raise InputError("population front retreats across a period boundary")
    cols = site_columns(trajectory)
    pops = trajectory[cols].to_numpy().T
    times = trajectory["t"].to_numpy() / period
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    mesh = ax.pcolormesh(times, np.arange(len(cols)), pops, cmap="magma",
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="population")
    for name, (lo, hi) in region_site_ranges(manifest).items():
        ax.axhline(lo - 0.5, color="white", lw=0.6, ls="--")
        ax.axhline(hi + 0.5, color="white", lw=0.6, ls="--")
        ax.text(times[-1] * 1.01, (lo + hi) / 2.0, name, fontsize=8,
                va="center", color="black")
    for p in range(1, int(math.floor(times[-1])) + 1):
        ax.axvline(p, color="cyan", lw=0.5, ls=":")
    ax.set_xlabel("time (periods)")
    ax.set_ylabel("flat site index")
    fig.tight_layout()
    _save(fig, out_path)


def render_regions(trajectory: pd.DataFrame, manifest: dict, out_path) -> None:
    """Region population curves with period gridlines."""
    cols = region_columns(trajectory)
    if not cols:
        raise InputError("trajectory: missing columns region_*")
    period = drive_period(manifest)
    times = trajectory["t"].to_numpy() / period
    fig, ax = plt.subplots(figsize=(6.0, 3.5))
    for col in cols:
        ax.plot(times, trajectory[col], lw=1.2, label=col.removeprefix("region_"))
    for p in range(1, int(math.floor(times[-1])) + 1):
        ax.axvline(p, color="gray", lw=0.5, ls=":")
    ax.set_xlabel("time (periods)")
    ax.set_ylabel("region population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, out_path)


__all__ = [
    "render_curves",
    "render_winding_panel",
    "render_heatmap",
    "render_regions",
    "front_positions",
]
