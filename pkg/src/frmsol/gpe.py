"""Axisymmetric time propagation of the condensate field.

One step of length dt is a Strang composition

    phase(dt/2) . C_rho(dt/2) . C_z(dt) . C_rho(dt/2) . phase(dt/2)

where phase() rotates by the local potential-plus-interaction term with
coefficients frozen at the step midpoint, and each C is a tridiagonal
Cayley (Crank-Nicolson) factor of the corresponding Laplacian piece.
The radial Laplacian is discretized in conservative flux form, which
makes it self-adjoint under the rho-weighted inner product; each Cayley
factor is then exactly unitary and the discrete norm is conserved to
rounding.  The flux form also removes the axis singularity: the inner
face of the first radial cell sits at rho = 0 and carries zero flux.

The same machinery runs in imaginary time (step -i dtau) for
ground-state preparation, with the field renormalized to the target
norm after every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import numpy as np

from . import kernels
from .core import (E_NUMBER_FACTOR, Field, Grid, PI, Verdict, discrete_norm,
                   observables, write_snapshot)
from .schedule import ConstantDrive, EndCap, frozen_at, lattice_profile


@dataclass
class SolverConfig:
    """Numerical parameters of one propagation run."""

    dt: float = 2e-3
    t_end: float = 500.0
    snapshot_times: tuple = ()
    boundary: str = "dirichlet"
    imag_time_tol: float = 1e-9
    imag_dt: float = 5e-3
    max_imag_iters: int = 200_000
    sample_stride: int = 50
    backend: str | None = None

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.boundary != "dirichlet":
            raise ValueError(
                f"unsupported boundary {self.boundary!r}; only 'dirichlet' "
                "walls are implemented")
        if self.imag_time_tol <= 0.0 or self.imag_dt <= 0.0:
            raise ValueError("imaginary-time parameters must be positive")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be at least 1")
        times = tuple(float(t) for t in self.snapshot_times)
        if list(times) != sorted(times):
            raise ValueError("snapshot_times must be ascending")
        if times and (times[0] < 0.0 or times[-1] > self.t_end):
            raise ValueError("snapshot_times must lie within [0, t_end]")
        self.snapshot_times = times


def radial_bands(grid: Grid):
    """Flux-form radial Laplacian bands (sub, diag, sup).

    a_j = rho_{j-1/2} / (rho_j d^2), c_j = rho_{j+1/2} / (rho_j d^2),
    b_j = -(a_j + c_j); the inner face of cell 0 sits at rho = 0 so
    a_0 = 0 exactly, and the outer wall is a Dirichlet ghost, which
    folds one extra -c into the last diagonal.
    """
    d = grid.d_rho
    rho = grid.rho
    inner = (rho - 0.5 * d) / (rho * d * d)
    outer = (rho + 0.5 * d) / (rho * d * d)
    sub = inner.copy()
    sub[0] = 0.0
    diag = -(sub + outer)
    diag[-1] -= outer[-1]
    sup = outer.copy()
    sup[-1] = 0.0
    return sub, diag, sup


def axial_bands(grid: Grid):
    """Uniform axial Laplacian bands with Dirichlet ghost walls at +-z_max."""
    inv = 1.0 / (grid.d_z * grid.d_z)
    n = grid.n_z
    sub = np.full(n, inv)
    sub[0] = 0.0
    sup = np.full(n, inv)
    sup[-1] = 0.0
    diag = np.full(n, -2.0 * inv)
    diag[0] = -3.0 * inv
    diag[-1] = -3.0 * inv
    return sub, diag, sup


def _cayley_factors(sub, diag, sup, kappa):
    """Precompute bands of (1 + kL) and Thomas factors of (1 - kL).

    Returns (ap, bp, cp, w, inv_dp, cm): the plus-operator bands, the
    forward-elimination multipliers, the reciprocal pivot diagonal, and
    the minus-operator upper band.  Reciprocals are precomputed so the
    per-step sweeps multiply instead of divide.
    """
    ap = kappa * sub
    bp = 1.0 + kappa * diag
    cp = kappa * sup
    am = -kappa * sub
    bm = 1.0 - kappa * diag
    cm = -kappa * sup
    n = len(diag)
    w = np.zeros(n, dtype=np.complex128)
    dp = np.empty(n, dtype=np.complex128)
    dp[0] = bm[0]
    for i in range(1, n):
        w[i] = am[i] / dp[i - 1]
        dp[i] = bm[i] - w[i] * cm[i - 1]
    return (ap.astype(np.complex128), bp.astype(np.complex128),
            cp.astype(np.complex128), w, 1.0 / dp,
            cm.astype(np.complex128))


class Stepper:
    """Factored operators and scratch space for one (grid, cap, dt) setup.

    ``imaginary=True`` replaces the step dt by -i dt, turning the same
    composition into a diffusive (ground-state projecting) update.
    """

    def __init__(self, grid: Grid, cap: EndCap | None, dt: float,
                 imaginary: bool = False, backend: str | None = None):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.grid = grid
        self.dt = dt
        self.imaginary = imaginary
        h = -1j * dt if imaginary else dt + 0j
        self.phase_c = -0.5j * h
        self.rho_factors = _cayley_factors(*radial_bands(grid), 1j * h / 8.0)
        self.z_factors = _cayley_factors(*axial_bands(grid), 1j * h / 4.0)
        self.lat_z = np.ascontiguousarray(lattice_profile(grid.z))
        if cap is None:
            self.cap_z = np.zeros(grid.n_z)
        else:
            self.cap_z = np.ascontiguousarray(cap.profile(grid.z),
                                              dtype=float)
        self.rho_sq = np.ascontiguousarray(grid.rho * grid.rho)
        self.work = np.empty(grid.shape, dtype=np.complex128)
        self.backend_name = backend or kernels.default_name()
        self.kern = kernels.load(self.backend_name)

    def advance(self, values: np.ndarray, t: float, drive) -> None:
        """Advance ``values`` in place by one step starting at time t."""
        t_mid = t + 0.5 * self.dt
        eps = drive.epsilon_at(t_mid)
        om = drive.omega_perp_at(t_mid)
        g = drive.g_at(t_mid)
        kern = self.kern
        kern.phase_rotation(values, self.lat_z, self.cap_z, self.rho_sq,
                            eps, 0.5 * om * om, g, self.phase_c)
        kern.cayley_axis0(values, self.work, *self.rho_factors)
        kern.cayley_axis1(values, self.work, *self.z_factors)
        kern.cayley_axis0(values, self.work, *self.rho_factors)
        kern.phase_rotation(values, self.lat_z, self.cap_z, self.rho_sq,
                            eps, 0.5 * om * om, g, self.phase_c)


def step(field: Field, t: float, dt: float, schedule,
         cap: EndCap | None = None, stepper: Stepper | None = None) -> Field:
    """One propagation step; returns a new Field at time t + dt."""
    if stepper is None:
        stepper = Stepper(field.grid, cap, dt)
    values = field.values.copy()
    stepper.advance(values, t, schedule)
    return Field(values, field.grid, t + dt)


def _apply_bands(values, sub, diag, sup, axis):
    """Banded matvec of one Laplacian piece along the given axis."""
    out = np.empty_like(values)
    if axis == 0:
        np.multiply(diag[:, None], values, out=out)
        out[1:] += sub[1:, None] * values[:-1]
        out[:-1] += sup[:-1, None] * values[1:]
    else:
        np.multiply(diag[None, :], values, out=out)
        out[:, 1:] += sub[1:] * values[:, :-1]
        out[:, :-1] += sup[:-1] * values[:, 1:]
    return out


def energy(field: Field, drive, t: float = 0.0,
           cap: EndCap | None = None) -> float:
    """Discrete energy functional at time t.

    E = integral of (1/2)|grad psi|^2 + V |psi|^2 + (g/2)|psi|^4, with
    the kinetic part evaluated through the same banded operators the
    propagator uses, so prepared states are stationary points of this
    exact functional.
    """
    grid = field.grid
    vals = field.values
    lap = _apply_bands(vals, *radial_bands(grid), axis=0)
    lap += _apply_bands(vals, *axial_bands(grid), axis=1)
    kinetic = -0.5 * np.real(np.conj(vals) * lap)
    abs2 = vals.real ** 2 + vals.imag ** 2
    pot = drive.epsilon_at(t) * lattice_profile(grid.z)
    if cap is not None:
        pot = pot + cap.profile(grid.z)
    om = drive.omega_perp_at(t)
    pot = pot[None, :] + 0.5 * om * om * (grid.rho ** 2)[:, None]
    g = drive.g_at(t)
    density = kinetic + pot * abs2 + 0.5 * g * abs2 * abs2
    return float(2.0 * PI * grid.d_rho * grid.d_z * (grid.rho @ density).sum())


def prepare_initial_state(grid: Grid, schedule, e_number: float,
                          cap: EndCap | None = None, *,
                          imag_dt: float = 5e-3, tol: float = 1e-9,
                          max_iters: int = 200_000,
                          backend: str | None = None) -> Field:
    """Ground state of the t = 0 Hamiltonian at the requested norm scale.

    Imaginary-time propagation with per-step renormalization to
    e_number * pi^(3/2).  Convergence is declared when the geometric
    extrapolation of the remaining energy drift falls below ``tol``
    relative, so that running longer changes the energy by less than
    ``tol``; raises RuntimeError if ``max_iters`` steps do not get
    there.
    """
    if e_number <= 0.0:
        raise ValueError("e_number must be positive")
    target = e_number * PI ** 1.5
    drive = frozen_at(schedule, 0.0)
    stepper = Stepper(grid, cap, imag_dt, imaginary=True, backend=backend)

    om = drive.omega_perp
    width_sq = 1.0 / om if om > 0.0 else (grid.rho_max / 3.0) ** 2
    values = np.exp(-grid.rho ** 2 / (2.0 * width_sq))[:, None].astype(
        np.complex128) * np.ones(grid.n_z)
    if cap is not None:
        values *= np.abs(grid.z) < cap.z_cap
    nrm = discrete_norm(values, grid)
    if nrm <= 0.0:
        raise ValueError("initial guess has zero norm; check cap geometry")
    values *= math.sqrt(target / nrm)

    check_every = 25
    prev_energy = energy(Field(values, grid, 0.0), drive, 0.0, cap)
    prev_delta = math.inf
    for it in range(1, max_iters + 1):
        stepper.advance(values, 0.0, drive)
        values *= math.sqrt(target / discrete_norm(values, grid))
        if it % check_every:
            continue
        e_now = energy(Field(values, grid, 0.0), drive, 0.0, cap)
        delta = abs(e_now - prev_energy)
        scale = max(abs(e_now), 1e-300)
        if delta / scale <= 1e-15:
            break
        ratio = delta / prev_delta if prev_delta > 0.0 else 1.0
        if ratio < 0.999 and delta * ratio / (1.0 - ratio) <= tol * scale \
                and delta / (check_every * scale) <= tol:
            break
        prev_energy = e_now
        prev_delta = delta
    else:
        raise RuntimeError(
            f"imaginary-time preparation did not converge within "
            f"{max_iters} iterations (tol {tol:g})")

    values *= math.sqrt(target / discrete_norm(values, grid))
    return Field(values, grid, 0.0)


@dataclass
class RunRecord:
    """Sampled diagnostics plus the final state of one propagation run.

    ``cell_norms[i]`` holds the per-cell norm shares of sample i;
    ``reference_time`` is the protocol's t4 (0 for bare drives) and
    anchors both the norm-drift figure and the classifier.
    """

    times: np.ndarray
    peaks: np.ndarray
    norms: np.ndarray
    e_numbers: np.ndarray
    rms_rho: np.ndarray
    rms_z: np.ndarray
    cell_norms: np.ndarray
    max_cell_index: int
    final_field: Field
    snapshots: list = dataclass_field(default_factory=list)
    reference_time: float = 0.0
    norm_drift: float = 0.0
    aborted: bool = False
    verdict: Verdict | None = None

    def cell_series(self, m: int) -> np.ndarray:
        """Norm share of lattice cell m at every sample (zeros off-grid)."""
        idx = m + self.max_cell_index
        if 0 <= idx < self.cell_norms.shape[1]:
            return self.cell_norms[:, idx]
        return np.zeros(len(self.times))


def _check_frm_resolution(dt: float, schedule) -> None:
    omega = getattr(schedule, "omega_frm", 0.0)
    g1f = getattr(schedule, "g1f", 0.0)
    if omega > 0.0 and g1f > 0.0:
        limit = 2.0 * PI / omega / 20.0
        if dt > limit * (1.0 + 1e-12):
            raise ValueError(
                f"dt = {dt:g} under-resolves the modulation period; "
                f"need dt <= {limit:g} (1/20 of 2 pi / omega_frm)")


def evolve(field: Field, schedule, cfg: SolverConfig,
           cap: EndCap | None = None, criteria=None,
           out_dir=None) -> RunRecord:
    """Propagate from ``field.time`` to ``cfg.t_end`` and classify the run.

    Observables are sampled every ``cfg.sample_stride`` steps (plus the
    first and last).  Snapshots are stored in the record and, when
    ``out_dir`` is given, written there as ``snapshot_t<label>.bin``.
    A non-finite sample aborts the run; the record is truncated and the
    verdict is Collapse.
    """
    from .analysis import classify_run

    _check_frm_resolution(cfg.dt, schedule)
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    grid = field.grid
    t0 = field.time
    if cfg.t_end <= t0:
        raise ValueError(f"t_end = {cfg.t_end:g} is not after the field "
                         f"time {t0:g}")
    n_steps = max(1, int(round((cfg.t_end - t0) / cfg.dt)))
    dt = (cfg.t_end - t0) / n_steps
    stepper = Stepper(grid, cap, dt, backend=cfg.backend)

    snap_at = {}
    for t_snap in cfg.snapshot_times:
        idx = int(round((t_snap - t0) / dt))
        if 0 <= idx <= n_steps:
            snap_at.setdefault(idx, t_snap)

    values = field.values.copy()
    times, peaks, norms, e_nums, r_rho, r_z, cells = [], [], [], [], [], [], []
    snapshots = []
    aborted = False

    def sample(t: float) -> bool:
        obs = observables(Field(values, grid, t))
        if not (math.isfinite(obs.peak_amplitude) and math.isfinite(obs.norm)):
            return False
        times.append(t)
        peaks.append(obs.peak_amplitude)
        norms.append(obs.norm)
        e_nums.append(obs.e_number)
        r_rho.append(obs.rms_rho)
        r_z.append(obs.rms_z)
        cells.append(obs.cell_norms)
        return True

    def snapshot(idx: int, label: float) -> None:
        snap = Field(values.copy(), grid, t0 + idx * dt)
        snapshots.append(snap)
        if out_dir is not None:
            write_snapshot(snap, f"{out_dir}/snapshot_t{label:g}.bin")

    sample(t0)
    if 0 in snap_at:
        snapshot(0, snap_at[0])
    for i in range(1, n_steps + 1):
        stepper.advance(values, t0 + (i - 1) * dt, schedule)
        if i in snap_at:
            snapshot(i, snap_at[i])
        if i % cfg.sample_stride == 0 or i == n_steps:
            if not sample(t0 + i * dt):
                aborted = True
                break

    record = RunRecord(
        times=np.asarray(times), peaks=np.asarray(peaks),
        norms=np.asarray(norms), e_numbers=np.asarray(e_nums),
        rms_rho=np.asarray(r_rho), rms_z=np.asarray(r_z),
        cell_norms=np.asarray(cells), max_cell_index=grid.max_cell_index,
        final_field=Field(values, grid, t0 + n_steps * dt),
        snapshots=snapshots,
        reference_time=float(getattr(schedule, "t4", 0.0)),
        aborted=aborted)

    ref_idx = int(np.searchsorted(record.times, record.reference_time))
    if ref_idx >= len(record.times):
        ref_idx = 0
    tail = record.norms[ref_idx:]
    if len(tail) and tail[0] > 0.0:
        record.norm_drift = float(np.max(np.abs(tail / tail[0] - 1.0)))
    record.verdict = classify_run(record, criteria)
    return record


def write_observables_csv(record: RunRecord, path) -> None:
    """Write the sampled series with the five central cell columns."""
    cell_cols = [record.cell_series(m) for m in range(-2, 3)]
    header = ("t,peak,norm,E,rms_rho,rms_z,"
              "cell_-2,cell_-1,cell_0,cell_1,cell_2")
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for i in range(len(record.times)):
            row = [record.times[i], record.peaks[i], record.norms[i],
                   record.e_numbers[i], record.rms_rho[i], record.rms_z[i]]
            row.extend(col[i] for col in cell_cols)
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")
