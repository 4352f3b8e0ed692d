import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trimerpump.drive import (
    DisorderRealization,
    DriveParams,
    GapClosingError,
    TrimerCurve,
    certificate_offsets,
    onsite_frequency,
    protection_certificate,
    sample_disorder,
    trimer_curve,
    winding_number,
    zero_disorder,
)
from trimerpump.lattice import ChainSpec, build_topology, fig1c_topology


def chain_topology(length=6, theta=math.pi / 3):
    return build_topology([ChainSpec(1, length, theta)], [])


def drive_for(top, delta=45.0, omega=0.015):
    return DriveParams.for_topology(top, delta, omega)


def crafted_disorder(top, per_site_offsets, strength):
    offsets = np.asarray(per_site_offsets, dtype=float)
    assert len(offsets) == top.n_sites
    return DisorderRealization(offsets, strength, seed=-1, topology=top)


class TestOnsiteFrequency:
    def test_reference_values_at_t0(self):
        top = chain_topology()
        drv = drive_for(top)
        assert onsite_frequency(drv, 1, 1, 0.0) == pytest.approx(22.5)

    def test_cosine_zero(self):
        top = chain_topology(theta=0.0)
        drv = drive_for(top, delta=13.0, omega=1.0)
        t = math.pi / 2  # omega*t + theta = pi/2
        assert onsite_frequency(drv, 1, 1, t) == pytest.approx(0.0, abs=1e-12)

    def test_trimer_pattern(self):
        top = chain_topology(theta=0.0)
        drv = drive_for(top)
        values = [onsite_frequency(drv, 1, l, 0.0) for l in (1, 2, 3)]
        assert values == pytest.approx([45.0, -22.5, -22.5])

    def test_disorder_added(self):
        top = chain_topology(theta=0.0)
        drv = drive_for(top)
        dis = crafted_disorder(top, [1.5, 0, 0, 0, 0, 0], 2.0)
        assert onsite_frequency(drv, 1, 1, 0.0, dis) == pytest.approx(46.5)


class TestSampleDisorder:
    def test_zero_strength(self):
        top = chain_topology()
        dis = sample_disorder(top, 0.0, 12345)
        assert np.all(dis.offsets == 0.0)

    def test_deterministic(self):
        top = fig1c_topology()
        a = sample_disorder(top, 20.0, 99)
        b = sample_disorder(top, 20.0, 99)
        assert np.array_equal(a.offsets, b.offsets)

    def test_different_seeds_differ(self):
        top = fig1c_topology()
        a = sample_disorder(top, 20.0, 1)
        b = sample_disorder(top, 20.0, 2)
        assert not np.array_equal(a.offsets, b.offsets)

    def test_uniform_statistics(self):
        top = chain_topology(length=9999)
        w = 20.0
        dis = sample_disorder(top, w, 4)
        sigma = 2 * w / math.sqrt(12)
        assert abs(float(np.mean(dis.offsets))) < 3 * sigma / 100
        assert float(np.max(np.abs(dis.offsets))) <= w

    def test_negative_strength_rejected(self):
        with pytest.raises(ValueError, match="strength"):
            sample_disorder(chain_topology(), -1.0, 0)


class TestTrimerCurve:
    def test_clean_curve_is_ellipse(self):
        top = chain_topology(theta=0.7)
        drv = drive_for(top)
        curve = trimer_curve(drv, zero_disorder(top), 1, 1, 128)
        x = drv.omega * curve.times + 0.7
        expected_ab = math.sqrt(3) * 45.0 * np.sin(x + math.pi / 3)
        expected_ac = math.sqrt(3) * 45.0 * np.sin(x + 2 * math.pi / 3)
        np.testing.assert_allclose(curve.gamma_ab, expected_ab, atol=1e-9)
        np.testing.assert_allclose(curve.gamma_ac, expected_ac, atol=1e-9)

    def test_disorder_rigidly_translates(self):
        top = chain_topology()
        drv = drive_for(top)
        offsets = [3.0, -1.0, 2.5, 0, 0, 0]
        dis = crafted_disorder(top, offsets, 3.0)
        clean = trimer_curve(drv, zero_disorder(top), 1, 1, 64)
        dirty = trimer_curve(drv, dis, 1, 1, 64)
        np.testing.assert_allclose(dirty.gamma_ab - clean.gamma_ab, 4.0, atol=1e-12)
        np.testing.assert_allclose(dirty.gamma_ac - clean.gamma_ac, 0.5, atol=1e-12)

    def test_curve_closed(self):
        top = chain_topology()
        drv = drive_for(top)
        curve = trimer_curve(drv, zero_disorder(top), 1, 2, 64)
        assert curve.gamma_ab[0] == pytest.approx(curve.gamma_ab[-1], abs=1e-9)
        assert curve.gamma_ac[0] == pytest.approx(curve.gamma_ac[-1], abs=1e-9)

    def test_refinement_stable_winding(self):
        top = fig1c_topology()
        drv = drive_for(top)
        dis = sample_disorder(top, 20.0, 11)
        coarse = winding_number(trimer_curve(drv, dis, 1, 1, 16))
        fine = winding_number(trimer_curve(drv, dis, 1, 1, 4096))
        assert coarse == fine

    def test_clean_curves_identical_across_trimers(self):
        top = chain_topology(length=12)
        drv = drive_for(top)
        dis = zero_disorder(top)
        first = trimer_curve(drv, dis, 1, 1, 64)
        for r in (2, 3, 4):
            other = trimer_curve(drv, dis, 1, r, 64)
            np.testing.assert_allclose(other.gamma_ab, first.gamma_ab, atol=1e-9)
            np.testing.assert_allclose(other.gamma_ac, first.gamma_ac, atol=1e-9)

    def test_invalid_trimer_rejected(self):
        top = chain_topology()
        drv = drive_for(top)
        with pytest.raises(ValueError, match="trimer"):
            trimer_curve(drv, zero_disorder(top), 1, 3, 64)

    def test_too_few_samples_rejected(self):
        top = chain_topology()
        drv = drive_for(top)
        with pytest.raises(ValueError, match="n_samples"):
            trimer_curve(drv, zero_disorder(top), 1, 1, 8)


def polygon_curve(x, y):
    return TrimerCurve(np.asarray(x, float), np.asarray(y, float),
                       np.arange(len(x), dtype=float), mu=1, r=1)


def circle(center, radius=1.0, n=64, reverse=False):
    ang = np.linspace(0.0, 2 * math.pi, n + 1)
    if reverse:
        ang = ang[::-1]
    return polygon_curve(center[0] + radius * np.cos(ang),
                         center[1] + radius * np.sin(ang))


def dense_winding_oracle(curve, n=200_000):
    """Angle accumulation on a densified resampling of the polyline."""
    x, y = curve.gamma_ab, curve.gamma_ac
    s = np.linspace(0, len(x) - 1, n)
    xs = np.interp(s, np.arange(len(x)), x)
    ys = np.interp(s, np.arange(len(y)), y)
    angles = np.unwrap(np.arctan2(ys, xs))
    return round((angles[-1] - angles[0]) / (2 * math.pi))


class TestWindingNumber:
    def test_unit_circle_ccw(self):
        assert winding_number(circle((0, 0))) == 1

    def test_unit_circle_cw(self):
        assert winding_number(circle((0, 0), reverse=True)) == -1

    def test_origin_outside(self):
        assert winding_number(circle((3, 0))) == 0

    def test_clean_trimer_curve_sign_matches_oracle(self):
        top = chain_topology()
        drv = drive_for(top)
        curve = trimer_curve(drv, zero_disorder(top), 1, 1, 256)
        w = winding_number(curve)
        assert abs(w) == 1
        assert w == dense_winding_oracle(curve)

    def test_gap_closing_sample_on_origin(self):
        top = chain_topology()
        drv = drive_for(top)
        clean = trimer_curve(drv, zero_disorder(top), 1, 1, 64)
        shifted = polygon_curve(clean.gamma_ab - clean.gamma_ab[3],
                                clean.gamma_ac - clean.gamma_ac[3])
        with pytest.raises(GapClosingError, match="gap closing"):
            winding_number(shifted)

    def test_gap_closing_segment_through_origin(self):
        square = polygon_curve([1, -1, -1, 1, 1], [0, 0, -1, -1, 0])
        with pytest.raises(GapClosingError):
            winding_number(square)

    @settings(deadline=None, max_examples=60)
    @given(shift=st.integers(0, 63), cx=st.floats(-3, 3), cy=st.floats(-3, 3))
    def test_cyclic_rotation_invariance(self, shift, cx, cy):
        if abs(math.hypot(cx, cy) - 1.0) < 0.05:
            return  # near the boundary the polyline may graze the origin
        base = circle((cx, cy))
        x, y = base.gamma_ab[:-1], base.gamma_ac[:-1]
        xr = np.concatenate([x[shift:], x[:shift], x[shift:shift + 1]])
        yr = np.concatenate([y[shift:], y[:shift], y[shift:shift + 1]])
        assert winding_number(polygon_curve(xr, yr)) == winding_number(base)

    @settings(deadline=None, max_examples=60)
    @given(cx=st.floats(-3, 3), cy=st.floats(-3, 3))
    def test_reversal_negates(self, cx, cy):
        if abs(math.hypot(cx, cy) - 1.0) < 0.05:
            return
        fwd = circle((cx, cy))
        rev = polygon_curve(fwd.gamma_ab[::-1], fwd.gamma_ac[::-1])
        assert winding_number(rev) == -winding_number(fwd)


class TestProtectionCertificate:
    def test_clean_encloses(self):
        assert protection_certificate(45.0, (0.0, 0.0)) is True

    def test_conservative_bound_always_protected(self):
        # for W/delta below 3/(2*sqrt(7)) every offset draw keeps the origin inside
        delta = 45.0
        w = 0.99 * delta * 3 / (2 * math.sqrt(7))
        rng = np.random.default_rng(0)
        deltas = rng.uniform(-w, w, size=(5000, 3))
        for da, db, dc in deltas:
            assert protection_certificate(delta, (da - db, da - dc))

    def test_sharp_threshold_is_three_quarters(self):
        # worst case over the offset box [-W, W]^3 sits at a vertex and equals
        # (4W/3delta)^2; the origin escapes first at W/delta = 3/4
        delta = 1.0
        for w, expected in ((0.749, True), (0.751, False)):
            worst = False
            for da in (-1, 1):
                for db in (-1, 1):
                    for dc in (-1, 1):
                        offs = (w * (da - db), w * (da - dc))
                        worst = worst or not protection_certificate(delta, offs)
            assert worst == (not expected)

    def test_reference_parameters_protected(self):
        # W=20, delta=45: ratio 0.444 is inside the bound
        top = fig1c_topology()
        drv = drive_for(top)
        for seed in range(50):
            dis = sample_disorder(top, 20.0, seed)
            for chain in top.chains:
                for r in (1, 2):
                    assert protection_certificate(
                        45.0, certificate_offsets(dis, chain.id, r))

    def test_agrees_with_winding_on_random_draws(self):
        top = chain_topology()
        drv = drive_for(top, delta=1.0)
        rng = np.random.default_rng(42)
        n_outside = 0
        for _ in range(2000):
            offs = rng.uniform(-1.2, 1.2, 3)
            dis = crafted_disorder(top, np.concatenate([offs, offs]), 1.2)
            cert = protection_certificate(1.0, certificate_offsets(dis, 1, 1))
            try:
                w = winding_number(trimer_curve(drv, dis, 1, 1, 512))
            except GapClosingError:
                continue
            assert cert == (abs(w) == 1)
            n_outside += (not cert)
        assert n_outside > 0  # the draw range actually exercises both outcomes

    def test_nonpositive_delta_rejected(self):
        with pytest.raises(ValueError):
            protection_certificate(0.0, (0.0, 0.0))


def test_drive_params_validation():
    with pytest.raises(ValueError):
        DriveParams(-1.0, 0.015, {1: 0.0})
    with pytest.raises(ValueError):
        DriveParams(45.0, 0.0, {1: 0.0})
    drv = DriveParams(45.0, 0.015, {1: 0.0})
    assert drv.period == pytest.approx(2 * math.pi / 0.015)
