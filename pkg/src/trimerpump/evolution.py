"""Norm-preserving propagation of single-excitation states and transport observables.

The workhorse integrator is midpoint-exponential: each step applies the exact
unitary exp(-i * H(t + dt/2) * dt) of the Hamiltonian frozen at the step
midpoint.  Eigendecompositions are batched over chunks of steps, which is the
hot path for multi-period runs.  A plain RK4 integrator ("reference") is kept
for cross-validation at small sizes; it is not unitary and should not be used
for production runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import DisorderRealization, DriveParams
from .hamiltonian import HamiltonianSnapshot
from .lattice import ArrayTopology, RegionSpec

NORM_ABORT = 1e-6
COM_WEIGHT_FLOOR = 1e-12
_CHUNK = 256


class IntegratorError(RuntimeError):
    """Propagation aborted: non-finite amplitudes or norm drift beyond tolerance."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, recording stride and integration scheme."""

    dt: float = 0.01
    stride: int = 100
    method: str = "midpoint-exponential"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.method not in ("midpoint-exponential", "reference"):
            raise ValueError(f"unknown integrator method {self.method!r}")


@dataclass
class Trajectory:
    """Recorded observables of one propagation run."""

    times: np.ndarray                 # (n_rec,)
    site_populations: np.ndarray      # (n_rec, N)
    region_populations: np.ndarray    # (n_rec, n_regions)
    region_names: tuple[str, ...]
    centers_of_mass: np.ndarray       # (n_rec, M); nan where the chain weight < 1e-12
    chain_ids: tuple[int, ...]
    final_state: np.ndarray           # (N,) complex

    def region_column(self, name: str) -> np.ndarray:
        return self.region_populations[:, self.region_names.index(name)]

    def com_column(self, mu: int) -> np.ndarray:
        return self.centers_of_mass[:, self.chain_ids.index(mu)]


def step(h_mid: HamiltonianSnapshot, psi: np.ndarray, dt: float) -> np.ndarray:
    """Apply exp(-i * H_mid * dt) to psi via Hermitian eigendecomposition."""
    w, v = np.linalg.eigh(h_mid.dense())
    out = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
    if not np.all(np.isfinite(out)):
        raise IntegratorError(f"non-finite amplitudes after step at t={h_mid.t}")
    return out


def region_population(psi: np.ndarray, region: RegionSpec) -> float:
    """Total occupation probability inside the region."""
    if not region.sites:
        return 0.0
    idx = np.fromiter(region.sites, dtype=int)
    return float(np.sum(np.abs(psi[idx]) ** 2))


def chain_center_of_mass(psi: np.ndarray, topology: ArrayTopology,
                         mu: int) -> tuple[float | None, float]:
    """Population-weighted mean site index (1-based) within chain mu, plus the weight.

    The position is None when the chain carries less than 1e-12 of the norm.
    """
    chain = topology.chain(mu)
    start = topology.flatten(mu, 1)
    pops = np.abs(psi[start:start + chain.length]) ** 2
    weight = float(np.sum(pops))
    if weight < COM_WEIGHT_FLOOR:
        return None, weight
    sites = np.arange(1, chain.length + 1)
    return float(np.sum(sites * pops) / weight), weight


def propagate(topology: ArrayTopology, drive: DriveParams,
              disorder: DisorderRealization | None, psi0: np.ndarray,
              t0: float, t1: float, config: IntegratorConfig,
              regions: list[RegionSpec] | None = None) -> Trajectory:
    """Fixed-step sweep from t0 to t1, recording observables every stride steps.

    The final time t1 is always hit exactly (the nominal dt is shrunk to divide
    the interval).  Bitwise deterministic for fixed inputs.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-8:
        raise ValueError("initial state must be normalized")
    if t1 < t0:
        raise ValueError(f"t1={t1} must be >= t0={t0}")
    if config.dt > 0.1 / drive.omega:
        raise ValueError(
            f"dt={config.dt} too coarse for omega={drive.omega}; need dt <= 0.1/omega"
        )
    regions = regions or []
    recorder = _Recorder(topology, regions)

    if t1 == t0:
        recorder.record(t0, psi0)
        return recorder.build(psi0)

    n_steps = max(1, math.ceil((t1 - t0) / config.dt - 1e-12))
    dt = (t1 - t0) / n_steps

    recorder.record(t0, psi0)
    if config.method == "reference":
        psi = _propagate_rk4(topology, drive, disorder, psi0, t0, dt, n_steps,
                             config.stride, recorder)
    else:
        psi = _propagate_midpoint(topology, drive, disorder, psi0, t0, dt, n_steps,
                                  config.stride, recorder)
    return recorder.build(psi)


class _Recorder:
    def __init__(self, topology: ArrayTopology, regions: list[RegionSpec]):
        self.times: list[float] = []
        self.site_pops: list[np.ndarray] = []
        self.region_pops: list[list[float]] = []
        self.coms: list[list[float]] = []
        self.region_names = tuple(r.name for r in regions)
        self.chain_ids = tuple(c.id for c in topology.chains)
        self._region_idx = [np.fromiter(sorted(r.sites), dtype=int) if r.sites
                            else np.empty(0, dtype=int) for r in regions]
        self._chain_slices = []
        self._chain_sites = []
        for chain in topology.chains:
            start = topology.flatten(chain.id, 1)
            self._chain_slices.append(slice(start, start + chain.length))
            self._chain_sites.append(np.arange(1, chain.length + 1, dtype=float))

    def record(self, t: float, psi: np.ndarray) -> None:
        pops = np.abs(psi) ** 2
        self.times.append(t)
        self.site_pops.append(pops)
        self.region_pops.append([float(np.sum(pops[idx])) if idx.size else 0.0
                                 for idx in self._region_idx])
        coms = []
        for sl, sites in zip(self._chain_slices, self._chain_sites):
            w = float(np.sum(pops[sl]))
            coms.append(float(np.sum(sites * pops[sl]) / w) if w >= COM_WEIGHT_FLOOR
                        else math.nan)
        self.coms.append(coms)

    def build(self, psi: np.ndarray) -> Trajectory:
        return Trajectory(
            times=np.asarray(self.times),
            site_populations=np.asarray(self.site_pops),
            region_populations=np.asarray(self.region_pops).reshape(len(self.times), -1),
            region_names=self.region_names,
            centers_of_mass=np.asarray(self.coms),
            chain_ids=self.chain_ids,
            final_state=psi,
        )


def _static_parts(topology: ArrayTopology, drive: DriveParams,
                  disorder: DisorderRealization | None):
    n = topology.n_sites
    bond_matrix = np.zeros((n, n))
    for i, j, amp in topology.bonds():
        bond_matrix[i, j] += amp
        bond_matrix[j, i] += amp
    phases = np.asarray(topology.site_phases(float(drive.b)))
    offsets = disorder.offsets if disorder is not None else np.zeros(n)
    if len(offsets) != n:
        raise ValueError("disorder/topology size mismatch")
    return bond_matrix, phases, offsets


def _propagate_midpoint(topology, drive, disorder, psi0, t0, dt, n_steps,
                        stride, recorder) -> np.ndarray:
    bond_matrix, phases, offsets = _static_parts(topology, drive, disorder)
    n = len(phases)
    diag_idx = np.arange(n)
    psi = psi0.copy()
    done = 0
    while done < n_steps:
        chunk = min(_CHUNK, n_steps - done)
        midpoints = t0 + (done + np.arange(chunk) + 0.5) * dt
        h = np.broadcast_to(bond_matrix, (chunk, n, n)).copy()
        h[:, diag_idx, diag_idx] += (drive.delta * np.cos(phases[None, :]
                                     + drive.omega * midpoints[:, None]) + offsets)
        w, v = np.linalg.eigh(h)
        phase_factors = np.exp(-1j * w * dt)
        for k in range(chunk):
            psi = v[k] @ (phase_factors[k] * (v[k].T @ psi))
            done += 1
            if done % stride == 0 or done == n_steps:
                _check_norm(psi, done)
                recorder.record(t0 + (n_steps * dt if done == n_steps else done * dt), psi)
    return psi


def _propagate_rk4(topology, drive, disorder, psi0, t0, dt, n_steps,
                   stride, recorder) -> np.ndarray:
    bond_matrix, phases, offsets = _static_parts(topology, drive, disorder)

    def h_at(t):
        h = bond_matrix.copy()
        np.fill_diagonal(h, drive.delta * np.cos(phases + drive.omega * t) + offsets)
        return h

    psi = psi0.copy()
    for k in range(n_steps):
        t = t0 + k * dt
        k1 = -1j * (h_at(t) @ psi)
        k2 = -1j * (h_at(t + dt / 2) @ (psi + dt / 2 * k1))
        k3 = -1j * (h_at(t + dt / 2) @ (psi + dt / 2 * k2))
        k4 = -1j * (h_at(t + dt) @ (psi + dt * k3))
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % stride == 0 or k + 1 == n_steps:
            _check_norm(psi, k + 1)
            recorder.record(t0 + (k + 1) * dt, psi)
    return psi


def _check_norm(psi: np.ndarray, step_index: int) -> None:
    if not np.all(np.isfinite(psi)):
        raise IntegratorError(f"non-finite amplitudes at step {step_index}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > NORM_ABORT:
        raise IntegratorError(
            f"integrator failure: norm drift {abs(norm - 1.0):.3e} at step {step_index}"
        )


def write_trajectory_csv(trajectory: Trajectory, path, config_hash: str = "") -> None:
    """Write the trajectory in the canonical CSV layout.

    Columns: t, site_0..site_{N-1}, region_<name>..., com_chain_<mu>...
    Centers of mass are blank where the chain weight is below 1e-12.  The first
    line carries the config hash as a '#' comment when one is given.
    """
    n_sites = trajectory.site_populations.shape[1]
    header = (["t"] + [f"site_{i}" for i in range(n_sites)]
              + [f"region_{name}" for name in trajectory.region_names]
              + [f"com_chain_{mu}" for mu in trajectory.chain_ids])
    lines = []
    if config_hash:
        lines.append(f"# config_hash={config_hash}")
    lines.append(",".join(header))
    for k, t in enumerate(trajectory.times):
        cells = [repr(float(t))]
        cells += [repr(float(x)) for x in trajectory.site_populations[k]]
        cells += [repr(float(x)) for x in trajectory.region_populations[k]]
        cells += ["" if math.isnan(x) else repr(float(x))
                  for x in trajectory.centers_of_mass[k]]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
