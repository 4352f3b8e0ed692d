"""Loaders for the simulator's CSV and JSON output files.

Every loader validates the columns it needs before any drawing happens, so a
bad input fails with a named-column error instead of a matplotlib traceback.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import pandas as pd


class InputError(ValueError):
    """Raised when an input file is missing required columns or rows."""


def _require_columns(frame: pd.DataFrame, names: list[str], path) -> None:
    missing = [name for name in names if name not in frame.columns]
    if missing:
        raise InputError(f"{path}: missing columns {', '.join(missing)}")


def load_trajectory(path) -> pd.DataFrame:
    """Trajectory CSV: t, per-site populations, region and center-of-mass columns."""
    frame = pd.read_csv(path, comment="#")
    _require_columns(frame, ["t"], path)
    if not [c for c in frame.columns if c.startswith("site_")]:
        raise InputError(f"{path}: missing columns site_*")
    if len(frame) < 2:
        raise InputError(f"{path}: empty trajectory")
    return frame


def load_winding(path) -> pd.DataFrame:
    frame = pd.read_csv(path, comment="#")
    _require_columns(frame, ["mu", "r", "winding", "certificate"], path)
    if len(frame) == 0:
        raise InputError(f"{path}: no winding rows")
    return frame


def load_curves(path) -> pd.DataFrame:
    frame = pd.read_csv(path, comment="#")
    _require_columns(frame, ["mu", "r", "t", "gamma_ab", "gamma_ac"], path)
    if len(frame) == 0:
        raise InputError(f"{path}: no curve rows")
    return frame


def load_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if "config" not in manifest:
        raise InputError(f"{path}: missing columns config")
    return manifest


def drive_period(manifest: dict) -> float:
    omega = manifest["config"]["drive"]["omega"]
    return 2.0 * math.pi / omega


def region_site_ranges(manifest: dict) -> dict[str, tuple[int, int]]:
    """Contiguous flat-site span of each named region, for overlay boxes.

    Reads the resolved layout section the simulator writes into every
    manifest, so preset topologies need no reconstruction here.
    """
    layout = manifest.get("layout")
    if layout is None:
        raise InputError("manifest: missing columns layout")
    spans: dict[str, tuple[int, int]] = {}
    for region in layout["regions"]:
        sites = region["sites"]
        spans[region["name"]] = (min(sites), max(sites))
    return spans


def site_columns(frame: pd.DataFrame) -> list[str]:
    cols = [c for c in frame.columns if c.startswith("site_")]
    return sorted(cols, key=lambda c: int(c.split("_")[1]))


def region_columns(frame: pd.DataFrame) -> list[str]:
    return [c for c in frame.columns if c.startswith("region_")]


__all__ = [
    "InputError",
    "load_trajectory",
    "load_winding",
    "load_curves",
    "load_manifest",
    "drive_period",
    "region_site_ranges",
    "site_columns",
    "region_columns",
]
