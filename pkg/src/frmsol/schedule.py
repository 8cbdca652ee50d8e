"""Run protocol: staged interaction, lattice, and trap coefficients.

The protocol has four marker times 0 < t1 < t2 <= t3 < t4:

* [0, t1]   repulsive hold, g = g_init, lattice ramping up;
* [t1, t2]  g ramps linearly to 0, lattice still ramping to eps_f;
* [t2, t3]  free lattice-held stage, g = 0;
* [t3, t4]  the modulated attraction ramps in while the transverse trap
            ramps out;
* [t4, inf) established stage: g(t) = -g0f_abs + g1f sin(omega_frm t),
            no transverse trap, lattice at eps_f.

Axial end caps (a tall potential shelf for |z| >= z_cap) confine the
initial repulsive slab to a few lattice cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EndCap:
    """Axial wall: adds ``height`` to the potential wherever |z| >= z_cap."""

    z_cap: float
    height: float = 1.0e3

    def __post_init__(self):
        if self.z_cap <= 0.0:
            raise ValueError("z_cap must be positive")
        if self.height < 0.0:
            raise ValueError("cap height must be non-negative")

    def profile(self, z) -> np.ndarray:
        return np.where(np.abs(z) >= self.z_cap, self.height, 0.0)


def lattice_profile(z):
    """Axial lattice shape 1 - cos(2z): minima at z = m*pi, unit depth scale."""
    return 1.0 - np.cos(2.0 * z)


@dataclass(frozen=True)
class Schedule:
    """Coefficient protocol; defaults reproduce the reference run."""

    g_init: float = 10.0
    g0f_abs: float = 22.5
    g1f: float = 90.0
    omega_frm: float = 40.0
    eps_f: float = 25.0
    omega_perp0: float = 0.3
    t1: float = 30.0
    t2: float = 100.0
    t3: float = 120.0
    t4: float = 130.0

    def __post_init__(self):
        if not (0.0 < self.t1 < self.t2 <= self.t3 < self.t4):
            raise ValueError(
                "marker times must satisfy 0 < t1 < t2 <= t3 < t4, got "
                f"{self.t1}, {self.t2}, {self.t3}, {self.t4}")
        if self.g_init < 0.0:
            raise ValueError("g_init must be non-negative")
        if self.g0f_abs <= 0.0:
            raise ValueError("g0f_abs must be positive")
        if self.g1f < 0.0:
            raise ValueError("g1f must be non-negative")
        if self.omega_frm <= 0.0:
            raise ValueError("omega_frm must be positive")
        if self.eps_f < 0.0:
            raise ValueError("eps_f must be non-negative")
        if self.omega_perp0 < 0.0:
            raise ValueError("omega_perp0 must be non-negative")

    def g_at(self, t: float) -> float:
        """Interaction coefficient; continuous at every stage boundary."""
        if t <= self.t1:
            return self.g_init
        if t <= self.t2:
            return self.g_init * (self.t2 - t) / (self.t2 - self.t1)
        if t <= self.t3:
            return 0.0
        drive = -self.g0f_abs + self.g1f * math.sin(self.omega_frm * t)
        if t < self.t4:
            return (t - self.t3) / (self.t4 - self.t3) * drive
        return drive

    def epsilon_at(self, t: float) -> float:
        """Lattice depth: linear ramp to eps_f over [0, t2], constant after."""
        return self.eps_f * min(max(t, 0.0) / self.t2, 1.0)

    def omega_perp_at(self, t: float) -> float:
        """Transverse trap frequency: constant to t3, linear to 0 at t4."""
        if t <= self.t3:
            return self.omega_perp0
        if t >= self.t4:
            return 0.0
        return self.omega_perp0 * (self.t4 - t) / (self.t4 - self.t3)

    def final_stage(self) -> "FrmStage":
        """Coefficients of the established stage (t >= t4)."""
        return FrmStage(self.g0f_abs, self.g1f, self.omega_frm, self.eps_f)


@dataclass(frozen=True)
class FrmStage:
    """Established-stage drive: fixed lattice, no trap, modulated attraction."""

    g0f_abs: float = 22.5
    g1f: float = 90.0
    omega_frm: float = 40.0
    eps_f: float = 25.0

    def __post_init__(self):
        if self.g0f_abs < 0.0 or self.g1f < 0.0 or self.eps_f < 0.0:
            raise ValueError("stage amplitudes must be non-negative")
        if self.omega_frm <= 0.0:
            raise ValueError("omega_frm must be positive")

    def g_at(self, t: float) -> float:
        return -self.g0f_abs + self.g1f * math.sin(self.omega_frm * t)

    def epsilon_at(self, t: float) -> float:
        return self.eps_f

    def omega_perp_at(self, t: float) -> float:
        return 0.0


@dataclass(frozen=True)
class ConstantDrive:
    """Frozen coefficients; used for ground-state preparation and tests."""

    g: float = 0.0
    eps: float = 0.0
    omega_perp: float = 0.0

    def g_at(self, t: float) -> float:
        return self.g

    def epsilon_at(self, t: float) -> float:
        return self.eps

    def omega_perp_at(self, t: float) -> float:
        return self.omega_perp


def frozen_at(drive, t: float) -> ConstantDrive:
    """Snapshot of any drive's coefficients at time t."""
    return ConstantDrive(g=drive.g_at(t), eps=drive.epsilon_at(t),
                         omega_perp=drive.omega_perp_at(t))


def potential_at(rho, z, t: float, schedule, endcap: EndCap | None = None):
    """External potential at (rho, z, t); broadcasts over array arguments."""
    omega = schedule.omega_perp_at(t)
    value = (schedule.epsilon_at(t) * lattice_profile(z)
             + 0.5 * omega * omega * np.square(rho))
    if endcap is not None:
        value = value + endcap.profile(z)
    return value
