"""Command line entry point: figkit KIND --in PATH [--in PATH ...] --out PATH."""

from __future__ import annotations

import argparse
import sys

from .io import InputError, load_curves, load_manifest, load_trajectory, load_winding
from .render import render_curves, render_heatmap, render_regions, render_winding_panel

KINDS = ("curves", "winding-panel", "heatmap", "regions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figkit",
        description="Render figures from simulator CSV/JSON outputs.",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="PATH",
                        help="input file; repeat for kinds that take several")
    parser.add_argument("--out", required=True, metavar="PATH",
                        help="output image path")
    return parser


def _dispatch(kind: str, inputs: list[str], out: str) -> None:
    if kind == "curves":
        winding = load_winding(inputs[1]) if len(inputs) > 1 else None
        render_curves(load_curves(inputs[0]), out, winding)
    elif kind == "winding-panel":
        render_winding_panel(load_winding(inputs[0]), out)
    elif kind == "heatmap":
        if len(inputs) != 2:
            raise InputError("heatmap needs --in trajectory.csv --in manifest.json")
        render_heatmap(load_trajectory(inputs[0]), load_manifest(inputs[1]), out)
    elif kind == "regions":
        if len(inputs) != 2:
            raise InputError("regions needs --in trajectory.csv --in manifest.json")
        render_regions(load_trajectory(inputs[0]), load_manifest(inputs[1]), out)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _dispatch(args.kind, args.inputs, args.out)
    except (InputError, FileNotFoundError) as exc:
        print(f"figkit error: {exc}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
