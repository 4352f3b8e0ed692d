"""Experiment configuration: schema, validation, presets and hashing."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import jsonschema
import numpy as np

from .drive import DriveParams
from .evolution import IntegratorConfig
from .lattice import ArrayTopology, ChainSpec, EdgeCoupling, RegionSpec, \
    bethe_topology, build_topology, fig1c_topology

SCHEMA_VERSION = 1
PRESET_NAMES = ("fig2", "single-chain", "bethe")


class ConfigError(ValueError):
    """Configuration rejected by the schema or by semantic validation."""


_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "topology", "drive", "disorder",
                 "initial_state", "duration_periods", "integrator", "regions"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "topology": {
            "type": "object",
            "oneOf": [
                {
                    "required": ["preset"],
                    "properties": {
                        "preset": {"enum": ["fig1c", "bethe"]},
                        "depth": {"type": "integer", "minimum": 1},
                        "length": {"type": "integer", "minimum": 3},
                        "theta": {"type": "number"},
                    },
                    "additionalProperties": False,
                },
                {
                    "required": ["chains"],
                    "properties": {
                        "chains": {
                            "type": "array",
                            "minItems": 1,
                            "items": {
                                "type": "object",
                                "required": ["id", "length"],
                                "properties": {
                                    "id": {"type": "integer", "minimum": 1},
                                    "length": {"type": "integer", "minimum": 3},
                                    "theta": {"type": "number"},
                                },
                                "additionalProperties": False,
                            },
                        },
                        "couplings": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["chain_a", "edge_a", "chain_b", "edge_b"],
                                "properties": {
                                    "chain_a": {"type": "integer"},
                                    "edge_a": {"enum": ["A", "C"]},
                                    "chain_b": {"type": "integer"},
                                    "edge_b": {"enum": ["A", "C"]},
                                    "strength": {"type": "number"},
                                },
                                "additionalProperties": False,
                            },
                        },
                    },
                    "additionalProperties": False,
                },
            ],
        },
        "drive": {
            "type": "object",
            "required": ["delta", "omega"],
            "properties": {
                "delta": {"type": "number", "minimum": 0},
                "omega": {"type": "number", "exclusiveMinimum": 0},
                "b": {
                    "type": "array",
                    "items": {"type": "integer"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
            "additionalProperties": False,
        },
        "disorder": {
            "type": "object",
            "required": ["strength", "seed"],
            "properties": {
                "strength": {"type": "number", "minimum": 0},
                "seed": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "initial_state": {
            "type": "object",
            "required": ["chain", "site"],
            "properties": {
                "chain": {"type": "integer", "minimum": 1},
                "site": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "duration_periods": {"type": "number", "minimum": 0},
        "integrator": {
            "type": "object",
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "stride": {"type": "integer", "minimum": 1},
                "method": {"enum": ["midpoint-exponential", "reference"]},
            },
            "additionalProperties": False,
        },
        "regions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "oneOf": [
                    {"required": ["name", "chains"]},
                    {"required": ["name", "sites"]},
                ],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "chains": {"type": "array", "items": {"type": "integer"}},
                    "sites": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                },
                "additionalProperties": False,
            },
        },
        "winding_samples": {"type": "integer", "minimum": 16},
    },
}


@dataclass(frozen=True)
class Experiment:
    """Fully resolved experiment: validated config plus constructed objects."""

    raw: dict
    topology: ArrayTopology
    drive: DriveParams
    seed: int
    disorder_strength: float
    initial_site: int
    duration_periods: float
    integrator: IntegratorConfig
    regions: tuple[RegionSpec, ...]
    winding_samples: int

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)

    def initial_state(self) -> np.ndarray:
        psi = np.zeros(self.topology.n_sites, dtype=complex)
        psi[self.initial_site] = 1.0
        return psi


def config_hash(config: dict) -> str:
    """Short stable hash of the canonical JSON form of a config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def load_preset(name: str) -> dict:
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}")
    text = resources.files("trimerpump.presets").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def _build_topology(spec: dict) -> ArrayTopology:
    if "preset" in spec:
        if spec["preset"] == "fig1c":
            return fig1c_topology(theta=spec.get("theta", math.pi / 3))
        return bethe_topology(spec.get("depth", 2), spec.get("length", 6),
                              spec.get("theta", math.pi / 3))
    chains = [ChainSpec(c["id"], c["length"], c.get("theta", math.pi / 3))
              for c in spec["chains"]]
    couplings = [EdgeCoupling(c["chain_a"], c["edge_a"], c["chain_b"], c["edge_b"],
                              c.get("strength", 1.0))
                 for c in spec.get("couplings", [])]
    return build_topology(chains, couplings)


def resolve(config: dict) -> Experiment:
    """Validate a config dict and construct the experiment objects."""
    try:
        jsonschema.validate(config, _SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config schema error at {list(exc.absolute_path)}: "
                          f"{exc.message}") from exc
    try:
        topology = _build_topology(config["topology"])
        d = config["drive"]
        b = Fraction(*d.get("b", [1, 3]))
        drive = DriveParams.for_topology(topology, d["delta"], d["omega"], b)
        integ = IntegratorConfig(**config.get("integrator", {}))
        init = config["initial_state"]
        initial_site = topology.flatten(init["chain"], init["site"])
        regions = []
        for r in config["regions"]:
            if "chains" in r:
                regions.append(RegionSpec.from_chains(r["name"], topology, r["chains"]))
            else:
                bad = [s for s in r["sites"] if s >= topology.n_sites]
                if bad:
                    raise ConfigError(f"region {r['name']!r} has out-of-range sites {bad}")
                regions.append(RegionSpec(r["name"], frozenset(r["sites"])))
        used = set()
        for region in regions:
            overlap = used & region.sites
            if overlap:
                raise ConfigError(f"region {region.name!r} overlaps earlier regions "
                                  f"on sites {sorted(overlap)[:5]}")
            used |= region.sites
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    return Experiment(
        raw=config,
        topology=topology,
        drive=drive,
        seed=config["disorder"]["seed"],
        disorder_strength=config["disorder"]["strength"],
        initial_site=initial_site,
        duration_periods=config["duration_periods"],
        integrator=integ,
        regions=tuple(regions),
        winding_samples=config.get("winding_samples", 256),
    )
