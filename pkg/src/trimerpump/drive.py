"""Adiabatic onsite modulation, seeded disorder and the per-trimer winding diagnostic.

Units: hbar = 1 and J = 1 throughout; energies in units of J, times in 1/J.
The onsite frequency of site l of chain mu is

    omega(mu, l, t) = delta * cos(2*pi*(l-1)*b + Omega*t + theta_mu) + offset(mu, l)

with a static, seeded uniform offset in [-W, W] per site.  For b = 1/3 the
three detunings of a trimer trace a closed ellipse in the
(omega_A - omega_B, omega_A - omega_C) plane once per period; the excitation
transport is protected on a trimer as long as that curve winds around the
origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .lattice import ArrayTopology


class GapClosingError(ValueError):
    """A trimer curve passes through (or too close to) the origin."""


@dataclass(frozen=True)
class DriveParams:
    """Amplitude, angular frequency, spatial period and per-chain phases of the drive."""

    delta: float
    omega: float
    phases: Mapping[int, float]
    b: Fraction = Fraction(1, 3)

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    @staticmethod
    def for_topology(topology: ArrayTopology, delta: float, omega: float,
                     b: Fraction = Fraction(1, 3)) -> "DriveParams":
        """Pull the per-chain phases from the topology's chain specs."""
        return DriveParams(delta, omega, {c.id: c.theta for c in topology.chains}, b)


@dataclass(frozen=True)
class DisorderRealization:
    """One static draw of uniform onsite offsets, regenerable from (seed, W, topology).

    Offsets are stored per flat site index in the topology's canonical order.
    The generator is numpy's PCG64 (``numpy.random.default_rng``), whose stream
    is stable across numpy versions; one ``uniform(-W, W)`` draw per site.
    """

    offsets: np.ndarray
    strength: float
    seed: int
    topology: ArrayTopology

    def offset(self, mu: int, l: int) -> float:
        return float(self.offsets[self.topology.flatten(mu, l)])


@dataclass(frozen=True)
class TrimerCurve:
    """Sampled detuning curve (gamma_AB, gamma_AC) of one trimer over one period."""

    gamma_ab: np.ndarray
    gamma_ac: np.ndarray
    times: np.ndarray
    mu: int
    r: int


def sample_disorder(topology: ArrayTopology, strength: float, seed: int) -> DisorderRealization:
    """Draw one uniform offset in [-strength, strength] per site, deterministically."""
    if strength < 0:
        raise ValueError(f"disorder strength must be >= 0, got {strength}")
    rng = np.random.default_rng(seed)
    offsets = rng.uniform(-strength, strength, topology.n_sites)
    if strength == 0:
        offsets = np.zeros(topology.n_sites)
    offsets.flags.writeable = False
    return DisorderRealization(offsets, strength, seed, topology)


def zero_disorder(topology: ArrayTopology) -> DisorderRealization:
    """Clean system: all offsets zero."""
    return sample_disorder(topology, 0.0, 0)


def onsite_frequency(drive: DriveParams, mu: int, l: int, t: float,
                     disorder: DisorderRealization | None = None) -> float:
    """Instantaneous onsite frequency of site l (1-based) of chain mu."""
    phase = 2.0 * math.pi * (l - 1) * float(drive.b) + drive.omega * t + drive.phases[mu]
    value = drive.delta * math.cos(phase)
    if disorder is not None:
        value += disorder.offset(mu, l)
    return value


def trimer_curve(drive: DriveParams, disorder: DisorderRealization, mu: int, r: int,
                 n_samples: int = 256) -> TrimerCurve:
    """Sample the closed detuning curve of trimer r of chain mu over one period.

    Returns n_samples + 1 points at uniformly spaced times covering [0, T];
    the last point closes the curve.
    """
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16, got {n_samples}")
    chain = disorder.topology.chain(mu)
    if not 1 <= r <= chain.n_trimers:
        raise ValueError(f"chain {mu} has {chain.n_trimers} trimers, got trimer index {r}")
    l_a, l_b, l_c = 3 * r - 2, 3 * r - 1, 3 * r
    times = np.arange(n_samples + 1) * (drive.period / n_samples)
    x = drive.omega * times + drive.phases[mu] + 2.0 * math.pi * (l_a - 1) * float(drive.b)
    step = 2.0 * math.pi * float(drive.b)
    w_a = drive.delta * np.cos(x) + disorder.offset(mu, l_a)
    w_b = drive.delta * np.cos(x + step) + disorder.offset(mu, l_b)
    w_c = drive.delta * np.cos(x + 2 * step) + disorder.offset(mu, l_c)
    return TrimerCurve(w_a - w_b, w_a - w_c, times, mu, r)


def winding_number(curve: TrimerCurve) -> int:
    """Signed number of times the closed curve winds around the origin.

    Sums the wrapped angle increments between consecutive samples; the total is
    an exact multiple of 2*pi for a closed polyline, so the residual after
    rounding must be below 1e-6.
    """
    x = np.asarray(curve.gamma_ab, dtype=float)
    y = np.asarray(curve.gamma_ac, dtype=float)
    _check_origin_clearance(x, y)
    cross = x[:-1] * y[1:] - y[:-1] * x[1:]
    dot = x[:-1] * x[1:] + y[:-1] * y[1:]
    total = float(np.sum(np.arctan2(cross, dot)))
    turns = total / (2.0 * math.pi)
    winding = round(turns)
    if abs(turns - winding) >= 1e-6:
        raise GapClosingError(
            f"winding residual {abs(turns - winding):.3e} >= 1e-6; curve is not closed"
        )
    return winding


def _check_origin_clearance(x: np.ndarray, y: np.ndarray) -> None:
    """Reject curves whose polyline comes within 1e-9 * scale of the origin."""
    scale = float(np.max(np.hypot(x, y)))
    tol = 1e-9 * scale
    # distance from the origin to each segment [(x0,y0),(x1,y1)]
    dx, dy = np.diff(x), np.diff(y)
    seg_len2 = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(seg_len2 > 0, -(x[:-1] * dx + y[:-1] * dy) / seg_len2, 0.0)
    s = np.clip(s, 0.0, 1.0)
    dist = np.hypot(x[:-1] + s * dx, y[:-1] + s * dy)
    if float(np.min(dist)) <= tol:
        raise GapClosingError(
            f"gap closing: curve approaches the origin within {tol:.3e}"
        )


# Geometry of the clean curve.  With x = Omega*t + theta the clean detunings are
# (sqrt(3)*delta*sin(x + pi/3), sqrt(3)*delta*sin(x + 2*pi/3)): an ellipse whose
# principal axes lie along the +/-45 degree diagonals with semi-axes
# 3*delta/sqrt(2) (sum direction) and sqrt(3)*delta/sqrt(2) (difference direction).
# Static disorder rigidly translates it by (dA-dB, dA-dC).

def protection_certificate(delta: float, offsets: tuple[float, float]) -> bool:
    """True iff the disorder-translated clean trimer ellipse encloses the origin.

    ``offsets`` is the translation (dA - dB, dA - dC) of the curve.
    """
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    dab, dac = offsets
    s0 = (dab + dac) / math.sqrt(2.0)
    d0 = (dac - dab) / math.sqrt(2.0)
    a = 3.0 * delta / math.sqrt(2.0)
    b = math.sqrt(3.0) * delta / math.sqrt(2.0)
    return (s0 / a) ** 2 + (d0 / b) ** 2 < 1.0


def certificate_offsets(disorder: DisorderRealization, mu: int, r: int) -> tuple[float, float]:
    """Translation (dA - dB, dA - dC) of the trimer curve for one trimer."""
    l_a = 3 * r - 2
    d_a = disorder.offset(mu, l_a)
    d_b = disorder.offset(mu, l_a + 1)
    d_c = disorder.offset(mu, l_a + 2)
    return (d_a - d_b, d_a - d_c)
