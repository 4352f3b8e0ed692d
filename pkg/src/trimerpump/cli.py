"""Reproducible experiment runner.

Verbs: simulate | sweep | chern | winding.  Every run writes data files whose
bytes depend only on the config and seeds (timestamps live in the manifest
only) and a manifest JSON that suffices to rerun the experiment.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, Experiment, config_hash, load_preset, resolve
from .drive import (GapClosingError, certificate_offsets, protection_certificate,
                    sample_disorder, trimer_curve, winding_number)
from .evolution import IntegratorError, Trajectory, propagate, write_trajectory_csv
from .invariants import BandTouchingError, BlochModel, chern_document, fhs_chern

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _load_config(args) -> dict:
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both")
    if args.preset:
        config = load_preset(args.preset)
    elif args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        raise ConfigError("one of --preset or --config is required")
    if args.dt is not None:
        config.setdefault("integrator", {})["dt"] = args.dt
    if getattr(args, "seed", None) is not None:
        config.setdefault("disorder", {})["seed"] = args.seed
    return config


def _write_manifest(out_dir: Path, name: str, experiment: Experiment,
                    extra: dict) -> Path:
    topology = experiment.topology
    manifest = {
        "tool": "trimerpump",
        "version": __version__,
        "config": experiment.raw,
        "config_hash": experiment.config_hash,
        # resolved layout, so downstream tools need not rebuild preset topologies
        "layout": {
            "chains": [{"id": c.id, "length": c.length} for c in topology.chains],
            "regions": [{"name": r.name, "sites": sorted(r.sites)}
                        for r in experiment.regions],
        },
        **extra,
    }
    path = out_dir / name
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _run_trajectory(experiment: Experiment, seed: int) -> Trajectory:
    disorder = sample_disorder(experiment.topology, experiment.disorder_strength, seed)
    t1 = experiment.duration_periods * experiment.drive.period
    return propagate(experiment.topology, experiment.drive, disorder,
                     experiment.initial_state(), 0.0, t1,
                     experiment.integrator, list(experiment.regions))


def _winding_rows(experiment: Experiment, seed: int):
    """Diagnostics for every trimer of the array: winding, certificate, flag."""
    disorder = sample_disorder(experiment.topology, experiment.disorder_strength, seed)
    rows = []
    curves = []
    for chain in experiment.topology.chains:
        for r in range(1, chain.n_trimers + 1):
            curve = trimer_curve(experiment.drive, disorder, chain.id, r,
                                 experiment.winding_samples)
            curves.append(curve)
            cert = protection_certificate(experiment.drive.delta,
                                          certificate_offsets(disorder, chain.id, r)) \
                if experiment.drive.delta > 0 else False
            try:
                winding = winding_number(curve)
                flag = ""
            except GapClosingError as exc:
                winding = None
                flag = str(exc)
            rows.append({"mu": chain.id, "r": r, "seed": seed,
                         "W": experiment.disorder_strength,
                         "winding": winding, "certificate": cert, "flag": flag})
    return rows, curves


def cmd_simulate(args) -> int:
    config = _load_config(args)
    experiment = resolve(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    trajectory = _run_trajectory(experiment, experiment.seed)
    h = experiment.config_hash
    csv_path = out_dir / f"trajectory_seed{experiment.seed}_{h}.csv"
    write_trajectory_csv(trajectory, csv_path, h)
    _write_manifest(out_dir, f"manifest_seed{experiment.seed}_{h}.json", experiment, {
        "command": "simulate",
        "seed": experiment.seed,
        "wall_time_s": time.time() - started,
        "outputs": [csv_path.name],
    })
    print(csv_path)
    return 0


def _parse_seeds(spec: str) -> list[int]:
    """Comma list and/or half-open a:b ranges; duplicates removed, order kept."""
    seeds: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ":" in part:
            lo, hi = part.split(":")
            seeds.extend(range(int(lo), int(hi)))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise ConfigError(f"no seeds in {spec!r}")
    deduped = list(dict.fromkeys(seeds))
    return deduped


def _sweep_one(payload):
    config, seed = payload
    experiment = resolve(config)
    trajectory = _run_trajectory(experiment, seed)
    rows, _ = _winding_rows(experiment, seed)
    windings = [abs(r["winding"]) for r in rows if r["winding"] is not None]
    record = {"seed": seed}
    for name in trajectory.region_names:
        record[f"final_region_{name}"] = float(trajectory.region_column(name)[-1])
    record["min_abs_winding"] = min(windings) if windings else 0
    record["certificate_all"] = all(r["certificate"] for r in rows)
    return record


def cmd_sweep(args) -> int:
    config = _load_config(args)
    experiment = resolve(config)  # validate before spawning workers
    seeds = _parse_seeds(args.seeds)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = args.threads or os.cpu_count() or 1
    started = time.time()
    payloads = [(config, seed) for seed in seeds]
    failures = []
    if threads > 1 and len(seeds) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            results = []
            for seed, future in [(s, pool.submit(_sweep_one, p))
                                 for (s, p) in zip(seeds, payloads)]:
                try:
                    results.append(future.result())
                except Exception as exc:  # worker failures recorded per seed
                    failures.append((seed, str(exc)))
    else:
        results = []
        for seed, payload in zip(seeds, payloads):
            try:
                results.append(_sweep_one(payload))
            except Exception as exc:
                failures.append((seed, str(exc)))

    h = experiment.config_hash
    columns = ["seed"] + [f"final_region_{n}" for n in
                          (r.name for r in experiment.regions)] \
        + ["min_abs_winding", "certificate_all"]
    lines = [f"# config_hash={h}", ",".join(columns)]
    for record in results:
        lines.append(",".join(_csv_cell(record[c]) for c in columns))
    rows_path = out_dir / f"sweep_{h}.csv"
    rows_path.write_text("\n".join(lines) + "\n")

    numeric = [c for c in columns if c != "seed"]
    summary_lines = [f"# config_hash={h}", "stat," + ",".join(numeric)]
    for stat, fn in (("mean", np.mean), ("min", np.min), ("max", np.max)):
        values = [fn([float(r[c]) for r in results]) if results else float("nan")
                  for c in numeric]
        summary_lines.append(stat + "," + ",".join(repr(float(v)) for v in values))
    summary_path = out_dir / f"sweep_summary_{h}.csv"
    summary_path.write_text("\n".join(summary_lines) + "\n")

    _write_manifest(out_dir, f"sweep_manifest_{h}.json", experiment, {
        "command": "sweep",
        "seeds": seeds,
        "threads": threads,
        "wall_time_s": time.time() - started,
        "failures": [{"seed": s, "error": e} for s, e in failures],
        "outputs": [rows_path.name, summary_path.name],
    })
    print(rows_path)
    if failures:
        for seed, err in failures:
            print(f"seed {seed} failed: {err}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_chern(args) -> int:
    model = BlochModel(delta=args.delta, j=args.j, p=args.p, q=args.q)
    result = fhs_chern(model, (args.grid[0], args.grid[1]))
    document = chern_document(model, result)
    text = json.dumps(document, indent=2, sort_keys=True) + "\n"
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "chern.json").write_text(text)
    print(text, end="")
    return 0


def cmd_winding(args) -> int:
    config = _load_config(args)
    experiment = resolve(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.time()
    rows, curves = _winding_rows(experiment, experiment.seed)
    h = experiment.config_hash
    lines = [f"# config_hash={h}", "mu,r,seed,W,winding,certificate,flag"]
    for row in rows:
        winding = "" if row["winding"] is None else str(row["winding"])
        lines.append(f"{row['mu']},{row['r']},{row['seed']},{_csv_cell(row['W'])},"
                     f"{winding},{_csv_cell(row['certificate'])},{row['flag']}")
    csv_path = out_dir / f"winding_seed{experiment.seed}_{h}.csv"
    csv_path.write_text("\n".join(lines) + "\n")

    curve_lines = [f"# config_hash={h}", "mu,r,t,gamma_ab,gamma_ac"]
    for curve in curves:
        for t, ab, ac in zip(curve.times, curve.gamma_ab, curve.gamma_ac):
            curve_lines.append(f"{curve.mu},{curve.r},{float(t)!r},"
                               f"{float(ab)!r},{float(ac)!r}")
    curves_path = out_dir / f"curves_seed{experiment.seed}_{h}.csv"
    curves_path.write_text("\n".join(curve_lines) + "\n")

    _write_manifest(out_dir, f"winding_manifest_seed{experiment.seed}_{h}.json",
                    experiment, {
                        "command": "winding",
                        "seed": experiment.seed,
                        "wall_time_s": time.time() - started,
                        "outputs": [csv_path.name, curves_path.name],
                    })
    print(csv_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimerpump",
        description="Adiabatic pumping of spin excitations through trimerized chain arrays",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, seeds=False):
        p.add_argument("--config", help="path to a config JSON file")
        p.add_argument("--preset", help="built-in preset: fig2, single-chain, bethe")
        p.add_argument("--out", default="runs", help="output directory")
        p.add_argument("--dt", type=float, default=None, help="override integrator dt")
        if seeds:
            p.add_argument("--seeds", required=True,
                           help="seed list/ranges, e.g. '0:20' or '1,2,5'")
            p.add_argument("--threads", type=int, default=None,
                           help="worker processes (default: all cores)")
        else:
            p.add_argument("--seed", type=int, default=None,
                           help="override the config's disorder seed")

    p_sim = sub.add_parser("simulate", help="run one trajectory")
    add_common(p_sim)
    p_sim.set_defaults(fn=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a disorder ensemble")
    add_common(p_sweep, seeds=True)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_chern = sub.add_parser("chern", help="bulk band Chern numbers")
    p_chern.add_argument("--p", type=int, default=1)
    p_chern.add_argument("--q", type=int, default=3)
    p_chern.add_argument("--delta", type=float, default=45.0)
    p_chern.add_argument("--j", type=float, default=1.0)
    p_chern.add_argument("--grid", type=int, nargs=2, default=[60, 60],
                         metavar=("NK", "NPHI"))
    p_chern.add_argument("--out", default=None)
    p_chern.set_defaults(fn=cmd_chern)

    p_wind = sub.add_parser("winding", help="per-trimer winding diagnostics")
    add_common(p_wind)
    p_wind.set_defaults(fn=cmd_winding)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegratorError, BandTouchingError, GapClosingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
