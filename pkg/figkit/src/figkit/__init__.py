"""Batch figure rendering for spin-array pump simulation outputs."""

from .io import (
    InputError,
    drive_period,
    load_curves,
    load_manifest,
    load_trajectory,
    load_winding,
    region_site_ranges,
)
from .render import (
    front_positions,
    render_curves,
    render_heatmap,
    render_regions,
    render_winding_panel,
)

__all__ = [
    "InputError",
    "drive_period",
    "load_curves",
    "load_manifest",
    "load_trajectory",
    "load_winding",
    "region_site_ranges",
    "front_positions",
    "render_curves",
    "render_heatmap",
    "render_regions",
    "render_winding_panel",
]
