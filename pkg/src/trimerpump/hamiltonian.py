"""Single-excitation Hamiltonian of the array at a fixed time.

In the single-excitation sector the XX spin array reduces to one particle
hopping on the site graph: diagonal entries are the instantaneous onsite
frequencies, off-diagonals are J = 1 on intra-chain nearest-neighbor bonds and
K on the declared A-C edge couplings.  All amplitudes are real in this gauge;
the global state-independent energy shift from the sigma_z terms is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .drive import DisorderRealization, DriveParams
from .lattice import ArrayTopology


class DenseSolverRefused(RuntimeError):
    """Dense diagonalization refused because the matrix exceeds the size cap."""


@dataclass(frozen=True)
class HamiltonianSnapshot:
    """Sparse N x N Hermitian snapshot: diagonal vector plus symmetric bond list."""

    diagonal: np.ndarray
    bonds: tuple[tuple[int, int, float], ...]
    t: float

    @property
    def n(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        """Dense real-symmetric matrix."""
        h = np.diag(np.asarray(self.diagonal, dtype=float))
        for i, j, amp in self.bonds:
            h[i, j] += amp
            h[j, i] += amp
        return h

    def entry(self, i: int, j: int) -> float:
        if i == j:
            return float(self.diagonal[i])
        for a, b, amp in self.bonds:
            if (a, b) == (min(i, j), max(i, j)):
                return amp
        return 0.0


def assemble(topology: ArrayTopology, drive: DriveParams,
             disorder: DisorderRealization | None, t: float) -> HamiltonianSnapshot:
    """Build the single-excitation Hamiltonian of the array at time t."""
    phases = np.asarray(topology.site_phases(float(drive.b)))
    diagonal = drive.delta * np.cos(phases + drive.omega * t)
    if disorder is not None:
        if len(disorder.offsets) != topology.n_sites:
            raise ValueError(
                f"disorder has {len(disorder.offsets)} offsets, topology has "
                f"{topology.n_sites} sites"
            )
        diagonal = diagonal + disorder.offsets
    diagonal.flags.writeable = False
    return HamiltonianSnapshot(diagonal, tuple(topology.bonds()), t)


def instantaneous_spectrum(snapshot: HamiltonianSnapshot, dense_cap: int = 1024) -> np.ndarray:
    """Real eigenvalues in ascending order, for gap monitoring along the cycle."""
    if snapshot.n > dense_cap:
        raise DenseSolverRefused(
            f"dense solver refused: N={snapshot.n} exceeds cap {dense_cap}"
        )
    return np.linalg.eigvalsh(snapshot.dense())


def dump_dense_csv(snapshot: HamiltonianSnapshot, path) -> None:
    """Debug dump: dense matrix, row-major, real and imaginary parts interleaved."""
    h = snapshot.dense().astype(complex)
    rows = []
    for row in h:
        cells = []
        for z in row:
            cells.append(repr(float(z.real)))
            cells.append(repr(float(z.imag)))
        rows.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
