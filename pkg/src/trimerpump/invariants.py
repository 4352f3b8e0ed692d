"""Bulk band structure and Chern numbers of the clean periodic model.

For b = p/q the clean chain has a q-site unit cell; over the torus of Bloch
momentum k and pump phase phi each band carries an integer Chern number, which
counts the unit cells an adiabatically pumped excitation traverses per cycle.
Chern numbers are computed with the lattice field-strength method: band
eigenvector overlaps define U(1) link variables, their plaquette fluxes sum to
2*pi times the integer.

Gauge convention: the momentum dependence sits on the single wraparound bond of
the unit cell, H[q-1, 0] = J * exp(i k) with k in [0, 2*pi); the remaining q-1
hopping entries stay real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BandTouchingError(RuntimeError):
    """Two bands are degenerate (within tolerance) somewhere on the grid."""

    def __init__(self, message: str, k: float, phi: float):
        super().__init__(message)
        self.k = k
        self.phi = phi


@dataclass(frozen=True)
class BlochModel:
    """q x q Bloch Hamiltonian family over the (k, phi) torus for b = p/q."""

    delta: float
    j: float = 1.0
    p: int = 1
    q: int = 3
    phi0: float = 0.0

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")


@dataclass(frozen=True)
class ChernResult:
    """Per-band Chern integers (ascending band energy) and grid diagnostics."""

    chern: tuple[int, ...]
    grid: tuple[int, int]
    max_flux_residual: float


def bloch_hamiltonian(model: BlochModel, k: float, phi: float) -> np.ndarray:
    """Bloch matrix at momentum k and pump phase phi (both 2*pi-periodic)."""
    q = model.q
    h = np.zeros((q, q), dtype=complex)
    m = np.arange(q)
    h[m, m] = model.delta * np.cos(2.0 * math.pi * m * model.p / q + phi + model.phi0)
    for i in range(q - 1):
        h[i, i + 1] = model.j
        h[i + 1, i] = model.j
    wrap = model.j * np.exp(1j * k)
    h[q - 1, 0] += wrap
    h[0, q - 1] += np.conj(wrap)
    return h


def _grid_eigensystem(model: BlochModel, n_k: int, n_phi: int):
    ks = 2.0 * math.pi * np.arange(n_k) / n_k
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    h = np.empty((n_k, n_phi, model.q, model.q), dtype=complex)
    for a, k in enumerate(ks):
        for b, phi in enumerate(phis):
            h[a, b] = bloch_hamiltonian(model, k, phi)
    energies, vectors = np.linalg.eigh(h)
    return ks, phis, energies, vectors


def _check_gaps(model: BlochModel, ks, phis, energies) -> None:
    tol = 1e-9 * max(abs(model.delta), abs(model.j))
    gaps = np.diff(energies, axis=-1)
    if float(np.min(gaps)) < tol:
        a, b, _ = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
        raise BandTouchingError(
            f"band touching on grid at k={ks[a]:.6f}, phi={phis[b]:.6f} "
            f"(gap {float(np.min(gaps)):.3e} < {tol:.3e})",
            k=float(ks[a]), phi=float(phis[b]),
        )


def fhs_chern(model: BlochModel, grid: tuple[int, int] = (60, 60)) -> ChernResult:
    """Per-band Chern integers via plaquette fluxes of eigenvector link variables."""
    n_k, n_phi = grid
    if n_k < 6 or n_phi < 6:
        raise ValueError(f"grid must be at least 6x6, got {grid}")
    ks, phis, energies, vectors = _grid_eigensystem(model, n_k, n_phi)
    _check_gaps(model, ks, phis, energies)

    # U(1) link variables per band: overlap with the neighbor in each direction
    u_k = np.sum(np.conj(vectors) * np.roll(vectors, -1, axis=0), axis=2)
    u_phi = np.sum(np.conj(vectors) * np.roll(vectors, -1, axis=1), axis=2)
    if float(np.min(np.abs(u_k))) < 1e-12 or float(np.min(np.abs(u_phi))) < 1e-12:
        raise BandTouchingError("vanishing link variable; refine the grid", 0.0, 0.0)

    # plaquette flux in (-pi, pi]
    loop = (u_k * np.roll(u_phi, -1, axis=0)
            * np.conj(np.roll(u_k, -1, axis=1)) * np.conj(u_phi))
    flux = np.angle(loop)
    totals = np.sum(flux, axis=(0, 1)) / (2.0 * math.pi)
    integers = np.rint(totals)
    residual = float(np.max(np.abs(totals - integers)))
    if residual > 1e-6:
        raise BandTouchingError(
            f"non-integer total flux (residual {residual:.3e}); refine the grid",
            0.0, 0.0,
        )
    return ChernResult(tuple(int(c) for c in integers), (n_k, n_phi), residual)


def min_gap(model: BlochModel, grid: tuple[int, int] = (60, 60)) -> float:
    """Smallest interband separation over the (k, phi) grid."""
    n_k, n_phi = grid
    _, _, energies, _ = _grid_eigensystem(model, n_k, n_phi)
    return float(np.min(np.diff(energies, axis=-1)))


def chern_document(model: BlochModel, result: ChernResult) -> dict:
    """JSON-ready summary of a Chern computation."""
    return {
        "p": model.p,
        "q": model.q,
        "delta": model.delta,
        "j": model.j,
        "grid": list(result.grid),
        "C": list(result.chern),
        "residual": result.max_flux_residual,
    }
