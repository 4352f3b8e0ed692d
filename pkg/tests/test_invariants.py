import math

import numpy as np
import pytest

from trimerpump.invariants import (
    BandTouchingError,
    BlochModel,
    bloch_hamiltonian,
    chern_document,
    fhs_chern,
    min_gap,
)


class TestBlochHamiltonian:
    def test_hermitian(self):
        model = BlochModel(delta=45.0)
        for k in (0.0, 0.7, math.pi):
            for phi in (0.0, 1.1):
                h = bloch_hamiltonian(model, k, phi)
                np.testing.assert_allclose(h, h.conj().T, atol=1e-14)

    def test_zero_hopping_diagonal(self):
        model = BlochModel(delta=45.0, j=0.0)
        for phi in np.linspace(0, 2 * math.pi, 7):
            h = bloch_hamiltonian(model, 0.3, phi)
            expected = 45.0 * np.cos(2 * math.pi * np.arange(3) / 3 + phi)
            np.testing.assert_allclose(np.diag(h), expected, atol=1e-12)
            assert np.count_nonzero(h - np.diag(np.diag(h))) == 0

    def test_zero_delta_spectrum_symmetric(self):
        # pure hopping trimer chain: the full band structure is symmetric about 0
        model = BlochModel(delta=0.0)
        eigs = []
        for k in 2 * math.pi * np.arange(120) / 120:
            eigs.extend(np.linalg.eigvalsh(bloch_hamiltonian(model, k, 0.0)))
        eigs = np.sort(eigs)
        np.testing.assert_allclose(eigs, -eigs[::-1], atol=1e-10)

    def test_phi_periodicity(self):
        model = BlochModel(delta=45.0)
        a = bloch_hamiltonian(model, 0.4, 0.9)
        b = bloch_hamiltonian(model, 0.4, 0.9 + 2 * math.pi)
        np.testing.assert_allclose(a, b, atol=1e-12 * 45.0)

    def test_strong_modulation_perturbative_eigenvalues(self):
        # diagonal (45, -22.5, -22.5); the degenerate pair is directly coupled,
        # so it splits by +/- J at first order, with O(J^2/delta) corrections
        model = BlochModel(delta=45.0)
        eigs = np.linalg.eigvalsh(bloch_hamiltonian(model, 0.0, 0.0))
        np.testing.assert_allclose(eigs, [-23.5, -21.5, 45.0], atol=0.05)


class TestFhsChern:
    def test_reference_values(self):
        result = fhs_chern(BlochModel(delta=45.0), (60, 60))
        assert sum(result.chern) == 0
        assert 2 in result.chern and -1 in result.chern
        assert result.chern == (-1, 2, -1)

    def test_grid_stability(self):
        model = BlochModel(delta=45.0)
        assert fhs_chern(model, (30, 30)).chern == fhs_chern(model, (120, 120)).chern

    def test_flux_residual_small(self):
        result = fhs_chern(BlochModel(delta=45.0), (60, 60))
        assert result.max_flux_residual < 1e-6

    def test_weak_modulation_same_integers(self):
        # topological integers do not depend on delta within the gapped phase
        assert fhs_chern(BlochModel(delta=2.0), (90, 90)).chern == (-1, 2, -1)

    def test_gauge_shift_invariance(self):
        base = fhs_chern(BlochModel(delta=45.0), (60, 60)).chern
        for phi0 in (0.3, math.pi / 3, 2.0):
            assert fhs_chern(BlochModel(delta=45.0, phi0=phi0), (60, 60)).chern == base

    def test_band_touching_at_zero_delta(self):
        with pytest.raises(BandTouchingError, match="band touching"):
            fhs_chern(BlochModel(delta=0.0), (60, 60))

    def test_grid_minimum_enforced(self):
        with pytest.raises(ValueError, match="grid"):
            fhs_chern(BlochModel(delta=45.0), (4, 60))


class TestMinGap:
    def test_diagonal_model_oracle(self):
        # j = 0: the gap is the smallest pairwise cosine separation over the grid
        delta = 45.0
        model = BlochModel(delta=delta, j=0.0)
        phis = 2 * math.pi * np.arange(60) / 60
        best = math.inf
        for phi in phis:
            vals = np.sort(delta * np.cos(2 * math.pi * np.arange(3) / 3 + phi))
            best = min(best, float(np.min(np.diff(vals))))
        assert min_gap(model, (60, 60)) == pytest.approx(best, abs=1e-9)

    def test_refinement_stable(self):
        model = BlochModel(delta=45.0)
        coarse = min_gap(model, (60, 60))
        fine = min_gap(model, (240, 240))
        assert coarse > 0
        assert abs(coarse - fine) < 0.05 * coarse

    def test_zero_delta_touches(self):
        assert min_gap(BlochModel(delta=0.0), (60, 60)) == pytest.approx(0.0, abs=1e-10)


def test_bloch_matches_finite_ring():
    # L = 3 * n_cells ring with real bonds: its spectrum is the union of the
    # Bloch eigenvalues at k = 2*pi*j/n_cells
    delta, j_hop, n_cells = 45.0, 1.0, 8
    phi = 0.8
    length = 3 * n_cells
    ring = np.zeros((length, length))
    for l in range(length):
        ring[l, l] = delta * math.cos(2 * math.pi * l / 3 + phi)
    for l in range(length):
        ring[l, (l + 1) % length] += j_hop
        ring[(l + 1) % length, l] += j_hop
    ring_eigs = np.sort(np.linalg.eigvalsh(ring))
    model = BlochModel(delta=delta, j=j_hop)
    bloch_eigs = []
    for jj in range(n_cells):
        k = 2 * math.pi * jj / n_cells
        bloch_eigs.extend(np.linalg.eigvalsh(bloch_hamiltonian(model, k, phi)))
    np.testing.assert_allclose(ring_eigs, np.sort(bloch_eigs), atol=1e-8)


def test_chern_document_layout():
    model = BlochModel(delta=45.0)
    doc = chern_document(model, fhs_chern(model, (60, 60)))
    assert doc["p"] == 1 and doc["q"] == 3
    assert doc["delta"] == 45.0 and doc["j"] == 1.0
    assert doc["grid"] == [60, 60]
    assert sorted(doc["C"]) == [-1, -1, 2]
    assert doc["residual"] < 1e-6
