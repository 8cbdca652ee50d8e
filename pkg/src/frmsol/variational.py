"""Gaussian-ansatz width dynamics and the analytic existence limits.

The field is reduced to a transverse width W and an axial width V whose
accelerations are

    Wdd = 1/W^3 - omega_perp(t)^2 W + E g(t) / (sqrt(8) W^3 V)
    Vdd = 1/V^3 - 4 eps(t) V exp(-V^2) + E g(t) / (sqrt(8) W^2 V^2)

with E the dimensionless atom-number scale.  For a frozen drive these
equations derive from the potential

    U(W, V) = W^-2 + omega_perp^2 W^2 + V^-2 / 2 - 2 eps exp(-V^2)
              + E g / (sqrt(8) W^2 V)

with the radial degree of freedom carrying effective mass 2, so
H = Wd^2 + Vd^2 / 2 + U is a first integral (see conserved_energy).

Static limits used across the package:

* a lattice-pinned axial width V0 solves 4 eps V0^4 exp(-V0^2) = 1,
  which has two roots once eps exceeds e^2/16 (the smaller root is the
  stable one);
* the mean attraction must exceed g0_min = sqrt(8) V0 / E for the
  averaged transverse equation to admit a fixed point;
* under fast modulation at frequency Omega the transverse width locks to
  w_bar with a small ripple of relative amplitude w1/w_bar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Verdict

SQRT8 = math.sqrt(8.0)
#: Below this width the attractive coupling term is effectively singular.
W_MIN = 1.0e-4
#: Beyond this width the trajectory is treated as escaped to infinity.
W_ESCAPE = 1.0e3


class CollapseImminent(RuntimeError):
    """Raised by the width equations when a width falls to W_MIN."""


@dataclass
class VaState:
    """Widths and their velocities."""

    w: float
    v: float
    w_dot: float = 0.0
    v_dot: float = 0.0


@dataclass
class VaParams:
    """Atom-number scale plus any drive exposing g_at/epsilon_at/omega_perp_at."""

    e_number: float
    schedule: object

    def __post_init__(self):
        if self.e_number <= 0.0:
            raise ValueError("e_number must be positive")


def _accels(w, v, t, e_number, drive):
    """Width accelerations; raises CollapseImminent at the small-width guard."""
    if w <= W_MIN or v <= W_MIN:
        raise CollapseImminent(f"width reached {W_MIN:g} at t = {t:.6g}")
    g = drive.g_at(t)
    eps = drive.epsilon_at(t)
    om = drive.omega_perp_at(t)
    coupling = e_number * g / SQRT8
    w_ddot = 1.0 / (w * w * w) - om * om * w + coupling / (w * w * w * v)
    v_ddot = (1.0 / (v * v * v) - 4.0 * eps * v * math.exp(-v * v)
              + coupling / (w * w * v * v))
    return w_ddot, v_ddot


def va_rhs(state: VaState, t: float, params: VaParams):
    """Time derivatives (w_dot, v_dot, w_ddot, v_ddot) of the width system."""
    w_ddot, v_ddot = _accels(state.w, state.v, t, params.e_number,
                             params.schedule)
    return (state.w_dot, state.v_dot, w_ddot, v_ddot)


def conserved_energy(state: VaState, *, g: float, eps: float,
                     omega_perp: float, e_number: float) -> float:
    """First integral of the width equations for frozen coefficients."""
    w, v = state.w, state.v
    potential = (1.0 / (w * w) + omega_perp * omega_perp * w * w
                 + 0.5 / (v * v) - 2.0 * eps * math.exp(-v * v)
                 + e_number * g / (SQRT8 * w * w * v))
    return state.w_dot ** 2 + 0.5 * state.v_dot ** 2 + potential


@dataclass
class VaTrajectory:
    """Recorded width trajectory; ``terminated`` is set on early exit."""

    t: np.ndarray
    w: np.ndarray
    v: np.ndarray
    w_dot: np.ndarray
    v_dot: np.ndarray
    terminated: Verdict | None = None
    note: str = ""

    def final_state(self) -> VaState:
        return VaState(float(self.w[-1]), float(self.v[-1]),
                       float(self.w_dot[-1]), float(self.v_dot[-1]))


def va_integrate(init: VaState, params: VaParams, t_end: float, dt: float,
                 record_stride: int = 1) -> VaTrajectory:
    """Integrate the width equations with fixed-step RK4 from t = 0.

    Terminates early with verdict Collapse when a width falls to W_MIN
    (directly or through the guard inside the stage evaluations) and
    with verdict Expand when W exceeds W_ESCAPE.  A non-finite state far
    from the collapse guard is reported as a failure rather than being
    classified.
    """
    if dt <= 0.0 or t_end <= 0.0:
        raise ValueError("t_end and dt must be positive")
    if record_stride < 1:
        raise ValueError("record_stride must be at least 1")
    omega = getattr(params.schedule, "omega_frm", 0.0)
    g1f = getattr(params.schedule, "g1f", 0.0)
    if omega > 0.0 and g1f > 0.0:
        limit = 2.0 * math.pi / omega / 20.0
        if dt > limit * (1.0 + 1e-12):
            raise ValueError(
                f"dt = {dt:g} under-resolves the modulation period; "
                f"need dt <= {limit:g} (1/20 of 2 pi / omega_frm)")
    n_steps = max(1, int(round(t_end / dt)))
    e_number = params.e_number
    drive = params.schedule

    w, v = float(init.w), float(init.v)
    wd, vd = float(init.w_dot), float(init.v_dot)
    ts = [0.0]
    ws = [w]
    vs = [v]
    wds = [wd]
    vds = [vd]
    terminated = None
    note = ""
    min_width = min(w, v)

    half = 0.5 * dt
    sixth = dt / 6.0
    def record(time_now):
        # keeps the terminal sample without duplicating an aligned stride
        if ts[-1] != time_now:
            ts.append(time_now)
            ws.append(w)
            vs.append(v)
            wds.append(wd)
            vds.append(vd)

    for step in range(n_steps):
        t = step * dt
        try:
            a1w, a1v = _accels(w, v, t, e_number, drive)
            w2 = w + half * wd
            v2 = v + half * vd
            wd2 = wd + half * a1w
            vd2 = vd + half * a1v
            a2w, a2v = _accels(w2, v2, t + half, e_number, drive)
            w3 = w + half * wd2
            v3 = v + half * vd2
            wd3 = wd + half * a2w
            vd3 = vd + half * a2v
            a3w, a3v = _accels(w3, v3, t + half, e_number, drive)
            w4 = w + dt * wd3
            v4 = v + dt * vd3
            wd4 = wd + dt * a3w
            vd4 = vd + dt * a3v
            a4w, a4v = _accels(w4, v4, t + dt, e_number, drive)
        except CollapseImminent as exc:
            terminated = Verdict.COLLAPSE
            note = str(exc)
            record(t)
            break
        w += sixth * (wd + 2.0 * (wd2 + wd3) + wd4)
        v += sixth * (vd + 2.0 * (vd2 + vd3) + vd4)
        wd += sixth * (a1w + 2.0 * (a2w + a3w) + a4w)
        vd += sixth * (a1v + 2.0 * (a2v + a3v) + a4v)
        t = (step + 1) * dt
        if not (math.isfinite(w) and math.isfinite(v)
                and math.isfinite(wd) and math.isfinite(vd)):
            # A blow-up right after a deep contraction is a collapse; any
            # other loss of finiteness is an integrator failure.
            if min_width <= 0.05:
                terminated = Verdict.COLLAPSE
                note = f"non-finite state after contraction at t = {t:.6g}"
                break
            raise RuntimeError(
                f"width integration lost finiteness at t = {t:.6g}")
        if w <= W_MIN or v <= W_MIN:
            terminated = Verdict.COLLAPSE
            note = f"width reached {W_MIN:g} at t = {t:.6g}"
            record(t)
            break
        if w >= W_ESCAPE:
            terminated = Verdict.EXPAND
            note = f"transverse width reached {W_ESCAPE:g} at t = {t:.6g}"
            record(t)
            break
        min_width = min(min_width, w, v)
        if (step + 1) % record_stride == 0 or step + 1 == n_steps:
            record(t)

    return VaTrajectory(np.asarray(ts), np.asarray(ws), np.asarray(vs),
                        np.asarray(wds), np.asarray(vds), terminated, note)


def epsilon_threshold() -> float:
    """Smallest lattice depth admitting a pinned axial width: e^2/16."""
    return math.e ** 2 / 16.0


def _pinning_lhs(eps: float, v: float) -> float:
    return 4.0 * eps * v ** 4 * math.exp(-v * v)


def solve_v0(epsilon: float) -> list[float]:
    """Real roots of 4 eps V^4 exp(-V^2) = 1, in increasing order.

    Returns [] below the depth threshold, a single root [sqrt(2)] exactly
    at it, and [small, large] above it.  Roots are bisected to full
    double precision; the smaller root is the stable pinned width.
    """
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    if epsilon == 0.0:
        return []
    v_peak = math.sqrt(2.0)
    peak = _pinning_lhs(epsilon, v_peak)
    if peak < 1.0 - 1e-14:
        return []
    if abs(peak - 1.0) <= 1e-14:
        return [v_peak]

    def bisect(lo, hi, increasing):
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if (_pinning_lhs(epsilon, mid) < 1.0) == increasing:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-16 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)

    lo = v_peak
    while _pinning_lhs(epsilon, lo) >= 1.0:
        lo *= 0.5
    small = bisect(lo, v_peak, increasing=True)
    hi = v_peak
    while _pinning_lhs(epsilon, hi) >= 1.0:
        hi *= 2.0
    large = bisect(v_peak, hi, increasing=False)
    return [small, large]


def g0_min(epsilon: float, e_number: float) -> float:
    """Minimum mean attraction sqrt(8) V0 / E for a transverse fixed point."""
    if e_number <= 0.0:
        raise ValueError("e_number must be positive")
    if epsilon <= epsilon_threshold():
        raise ValueError(
            "epsilon is at or below the pinning threshold e^2/16; "
            "no pinned axial width exists")
    return SQRT8 * solve_v0(epsilon)[0] / e_number


def w_bar_prediction(epsilon: float, e_number: float, g0f_abs: float,
                     g1f: float, omega_frm: float):
    """Averaged-theory locked transverse width and its ripple amplitude.

    Returns (w_bar, w1) with

        w_bar^4 = 3 (E g1f / Omega)^2 / (4 sqrt(2) V0 (E g0f_abs - sqrt(8) V0))
        w1 = -E g1f / (sqrt(8) w_bar^3 V0 Omega^2)

    Degenerates to (0, 0) when g1f = 0 (no modulation: the averaged
    equations have no locked width).  Raises when the mean attraction
    does not exceed g0_min.
    """
    if omega_frm <= 0.0:
        raise ValueError("omega_frm must be positive")
    if g1f < 0.0:
        raise ValueError("g1f must be non-negative")
    if e_number <= 0.0:
        raise ValueError("e_number must be positive")
    v0 = solve_v0(epsilon)
    if len(v0) < 2:
        raise ValueError(
            "epsilon is at or below the pinning threshold e^2/16; "
            "no pinned axial width exists")
    v0_small = v0[0]
    margin = e_number * g0f_abs - SQRT8 * v0_small
    if margin <= 0.0:
        raise ValueError(
            f"mean attraction E*g0f_abs = {e_number * g0f_abs:g} does not "
            f"exceed sqrt(8)*V0 = {SQRT8 * v0_small:g}")
    if g1f == 0.0:
        return 0.0, 0.0
    ratio = e_number * g1f / omega_frm
    w_bar = (3.0 * ratio * ratio
             / (4.0 * math.sqrt(2.0) * v0_small * margin)) ** 0.25
    w1 = -e_number * g1f / (SQRT8 * w_bar ** 3 * v0_small * omega_frm ** 2)
    return w_bar, w1


def initial_state(epsilon: float, e_number: float, g0f_abs: float,
                  g1f: float, omega_frm: float) -> VaState:
    """Rest state at the predicted locked widths, with generic fallbacks.

    W starts at w_bar when the averaged theory admits one, else at 1;
    V starts at the stable pinned width when the lattice admits one,
    else at 1.  Velocities start at zero.
    """
    roots = solve_v0(epsilon)
    v = roots[0] if len(roots) == 2 else 1.0
    try:
        w_bar, _ = w_bar_prediction(epsilon, e_number, g0f_abs, g1f,
                                    omega_frm)
    except ValueError:
        w_bar = 0.0
    w = w_bar if w_bar > 0.0 else 1.0
    return VaState(w=w, v=v)


def va_classify(trajectory: VaTrajectory,
                window_fraction: float = 0.25) -> Verdict:
    """Classify a width trajectory.

    Early termination fixes the verdict.  Otherwise the trailing window
    must keep both widths inside [10 W_MIN, W_ESCAPE / 10] with a
    transverse breathing ratio below 10 to count as Stable; failing
    that, a low-side excursion is a Collapse and anything else an
    Expand.
    """
    if not (0.0 < window_fraction <= 1.0):
        raise ValueError("window_fraction must lie in (0, 1]")
    if trajectory.terminated is not None:
        return trajectory.terminated
    n = len(trajectory.t)
    k = max(2, int(math.ceil(n * window_fraction)))
    w_win = trajectory.w[-k:]
    v_win = trajectory.v[-k:]
    lo = 10.0 * W_MIN
    hi = W_ESCAPE / 10.0
    w_lo = float(w_win.min())
    v_lo = float(v_win.min())
    w_hi = float(w_win.max())
    v_hi = float(v_win.max())
    if (w_lo >= lo and v_lo >= lo and w_hi <= hi and v_hi <= hi
            and w_hi / w_lo < 10.0):
        return Verdict.STABLE
    if min(w_lo, v_lo) < lo:
        return Verdict.COLLAPSE
    return Verdict.EXPAND


def write_trajectory_csv(trajectory: VaTrajectory, path) -> None:
    """Write the trajectory as CSV with columns t, W, V, Wdot, Vdot."""
    with open(path, "w", newline="\n") as fh:
        fh.write("t,W,V,Wdot,Vdot\n")
        for row in zip(trajectory.t, trajectory.w, trajectory.v,
                       trajectory.w_dot, trajectory.v_dot):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
