"""Propagator physics: unitarity, free spreading, stationary states,
splitting order, ground-state preparation, and run records.

Closed-form oracles: a free Gaussian of width s0 obeys
sigma^2(t) = s0^2 + t^2/s0^2 for the |psi|^2 widths (radial rms equals
sigma, axial rms sigma/sqrt(2)); exp(-rho^2/2) is the radial ground
state of the unit trap; the breathing of a g = 0 radial Gaussian is
reproduced exactly by the width ODEs, so the PDE and ODE solvers cross
check each other.
"""

import math

import numpy as np
import pytest

from frmsol.core import Field, discrete_norm, make_grid, norm, observables, read_snapshot
from frmsol.gpe import (
    SolverConfig,
    Stepper,
    energy,
    evolve,
    prepare_initial_state,
    step,
    write_observables_csv,
)
from frmsol.schedule import ConstantDrive, EndCap, Schedule
from frmsol.variational import VaParams, VaState, va_integrate

PI = math.pi


def box_mode(grid):
    """Axial fundamental of the Dirichlet box; exactly stationary."""
    return np.cos(PI * grid.z / (2.0 * grid.z_max))


# ------------------------------------------------------------ unit steps

def test_step_returns_new_field_and_advances_time():
    grid = make_grid(16, 32, 4.0, 2 * PI)
    field = Field(np.exp(-grid.rho[:, None] ** 2 - grid.z[None, :] ** 2)
                  .astype(complex), grid, time=1.0)
    before = field.values.copy()
    out = step(field, 1.0, 1e-3, ConstantDrive())
    assert out is not field
    assert out.time == pytest.approx(1.001)
    np.testing.assert_array_equal(field.values, before)
    assert np.shares_memory(out.values, field.values) is False


def test_norm_preserved_per_step():
    grid = make_grid(32, 64, 6.0, 2 * PI)
    rng = np.random.default_rng(2)
    values = ((rng.standard_normal(grid.shape)
               + 1j * rng.standard_normal(grid.shape))
              * np.exp(-grid.rho[:, None] ** 2 / 6 - grid.z[None, :] ** 2 / 9))
    drive = ConstantDrive(g=-2.0, eps=25.0, omega_perp=0.3)
    stepper = Stepper(grid, None, dt=2e-3)
    before = discrete_norm(values, grid)
    stepper.advance(values, 0.0, drive)
    after = discrete_norm(values, grid)
    assert abs(after - before) / before < 1e-10


def test_imaginary_step_contracts_energy():
    grid = make_grid(32, 64, 6.0, 2 * PI)
    drive = ConstantDrive(omega_perp=1.0)
    values = (np.exp(-grid.rho[:, None] ** 2 / 8.0)
              * box_mode(grid)[None, :]).astype(complex)
    target = discrete_norm(values, grid)
    stepper = Stepper(grid, None, dt=5e-3, imaginary=True)
    e0 = energy(Field(values, grid), drive)
    for _ in range(200):
        stepper.advance(values, 0.0, drive)
        values *= math.sqrt(target / discrete_norm(values, grid))
    e1 = energy(Field(values, grid), drive)
    assert e1 < e0


def test_free_gaussian_spreading_law():
    grid = make_grid(160, 256, 10.0, 4 * PI)
    s0 = 1.0
    values = np.exp(-grid.rho[:, None] ** 2 / (2 * s0 ** 2)
                    - grid.z[None, :] ** 2 / (2 * s0 ** 2)).astype(complex)
    dt = 2.5e-3
    stepper = Stepper(grid, None, dt)
    for i in range(400):
        stepper.advance(values, i * dt, ConstantDrive())
    obs = observables(Field(values, grid))
    sigma_sq = s0 ** 2 + 1.0 / s0 ** 2  # t = 1
    assert obs.rms_rho == pytest.approx(math.sqrt(sigma_sq), rel=5e-3)
    assert obs.rms_z == pytest.approx(math.sqrt(sigma_sq / 2), rel=5e-3)


def test_trap_ground_state_is_stationary():
    grid = make_grid(192, 48, 10.0, 8 * PI)
    psi0 = (np.exp(-grid.rho[:, None] ** 2 / 2.0)
            * box_mode(grid)[None, :]).astype(complex)
    drive = ConstantDrive(omega_perp=1.0)
    dt = 1e-3
    stepper = Stepper(grid, None, dt)
    values = psi0.copy()
    for i in range(int(round(2 * PI / dt))):
        stepper.advance(values, i * dt, drive)
    drift = np.max(np.abs(np.abs(values) - np.abs(psi0)))
    assert drift / np.abs(psi0).max() < 1e-6


def test_splitting_is_second_order():
    grid = make_grid(64, 96, 8.0, 2 * PI)
    drive = ConstantDrive(g=-1.0, eps=5.0, omega_perp=0.5)
    base = np.exp(-grid.rho[:, None] ** 2 / 2
                  - grid.z[None, :] ** 2 / 3).astype(complex)

    def endpoint(dt):
        values = base.copy()
        stepper = Stepper(grid, None, dt)
        for i in range(int(round(0.5 / dt))):
            stepper.advance(values, i * dt, drive)
        return values

    ref = endpoint(3.125e-4)
    err_coarse = np.max(np.abs(endpoint(5e-3) - ref))
    err_fine = np.max(np.abs(endpoint(2.5e-3) - ref))
    assert 3.4 < err_coarse / err_fine < 4.6


def test_z_parity_preserved():
    # Window ends at t=3.0: soon after the driven stage begins, mirror-cell
    # dephasing starts amplifying rounding asymmetry, so only the ramp stages
    # plus the early modulated stage admit a tight parity bound.
    grid = make_grid(32, 64, 6.0, 2 * PI)
    cap = EndCap(z_cap=1.5 * PI)
    sched = Schedule(t1=0.5, t2=1.0, t3=1.5, t4=2.0)
    field = prepare_initial_state(grid, sched, 1.0, cap, tol=1e-8)
    values = field.values.copy()
    stepper = Stepper(grid, cap, 2e-3)
    for i in range(1500):
        stepper.advance(values, i * 2e-3, sched)
    asym = np.linalg.norm(values - values[:, ::-1])
    assert asym / np.linalg.norm(values) < 1e-8


def test_va_cross_check_radial_breathing():
    grid = make_grid(256, 96, 10.0, 4 * PI)
    w0 = 2.0
    values = (np.exp(-grid.rho[:, None] ** 2 / (2 * w0 ** 2))
              * box_mode(grid)[None, :]).astype(complex)
    drive = ConstantDrive(omega_perp=1.0)
    traj = va_integrate(VaState(w=w0, v=1.0), VaParams(1.0, drive),
                        t_end=5.0, dt=1e-3)
    dt = 1e-3
    stepper = Stepper(grid, None, dt)
    worst = 0.0
    for i in range(5000):
        stepper.advance(values, i * dt, drive)
        if (i + 1) % 100 == 0:
            t = (i + 1) * dt
            obs = observables(Field(values, grid))
            k = min(np.searchsorted(traj.t, t), len(traj.w) - 1)
            worst = max(worst, abs(obs.rms_rho - traj.w[k]) / traj.w[k])
    assert worst < 0.02


# ------------------------------------------------------------ preparation

def test_prepared_state_matches_radial_oscillator():
    grid = make_grid(96, 32, 12.0, 2 * PI)
    field = prepare_initial_state(grid, Schedule(g_init=0.0), 1.0)
    assert field.time == 0.0
    assert norm(field) == pytest.approx(PI ** 1.5, rel=1e-12)

    weight = grid.rho * grid.d_rho
    slice_mid = np.abs(field.values[:, grid.n_z // 2])
    gauss = np.exp(-0.3 * grid.rho ** 2 / 2.0)

    def l2(profile):
        return math.sqrt(float((weight * profile ** 2).sum()))

    err = l2(slice_mid / l2(slice_mid) - gauss / l2(gauss))
    assert err < 0.01


def test_prepared_state_is_fixed_point():
    grid = make_grid(96, 32, 12.0, 2 * PI)
    tol = 1e-9
    field = prepare_initial_state(grid, Schedule(g_init=0.0), 1.0, tol=tol)
    drive = ConstantDrive(omega_perp=0.3)
    e_converged = energy(field, drive)
    values = field.values.copy()
    target = norm(field)
    stepper = Stepper(grid, None, 5e-3, imaginary=True)
    for _ in range(1000):
        stepper.advance(values, 0.0, drive)
        values *= math.sqrt(target / discrete_norm(values, grid))
    e_later = energy(Field(values, grid), drive)
    assert abs(e_later - e_converged) / abs(e_converged) < 5 * tol


def test_prepare_respects_caps_and_norm_target():
    grid = make_grid(48, 128, 8.0, 4 * PI)
    cap = EndCap(z_cap=2.5 * PI)
    field = prepare_initial_state(grid, Schedule(), 0.5, cap)
    assert norm(field) == pytest.approx(0.5 * PI ** 1.5, rel=1e-12)
    outside = np.abs(grid.z) >= cap.z_cap + 0.5
    # the tall shelf empties the capped region
    assert np.max(np.abs(field.values[:, outside])) < 1e-6 * np.max(
        np.abs(field.values))


def test_prepare_error_paths():
    grid = make_grid(48, 128, 8.0, 4 * PI)
    with pytest.raises(ValueError):
        prepare_initial_state(grid, Schedule(), -1.0)
    with pytest.raises(RuntimeError):
        prepare_initial_state(grid, Schedule(), 1.0, max_iters=10)
    tight = EndCap(z_cap=0.01)
    with pytest.raises(ValueError):
        prepare_initial_state(grid, Schedule(), 1.0, tight)


# ----------------------------------------------------------------- evolve

def stationary_setup():
    grid = make_grid(48, 64, 8.0, 2 * PI)
    sched = Schedule(g_init=0.0, omega_perp0=1.0)
    field = prepare_initial_state(grid, sched, 1.0)
    return field, ConstantDrive(omega_perp=1.0)


def test_evolve_records_and_classifies_stationary_run(tmp_path):
    field, drive = stationary_setup()
    cfg = SolverConfig(dt=2e-3, t_end=2.0, sample_stride=10,
                       snapshot_times=(0.0, 1.0))
    record = evolve(field, drive, cfg, out_dir=tmp_path)
    assert str(record.verdict) == "Stable"
    times = np.asarray(record.times)
    assert np.all(np.diff(times) > 0)
    assert times[0] == 0.0 and times[-1] == pytest.approx(2.0)
    assert record.norm_drift < 1e-10
    assert (tmp_path / "snapshot_t0.bin").exists()
    snap = read_snapshot(tmp_path / "snapshot_t1.bin")
    assert snap.time == pytest.approx(1.0)
    assert snap.grid.n_rho == 48
    peaks = np.asarray(record.peaks)
    assert np.max(peaks) / np.min(peaks) < 1.001


def test_evolve_rejects_bad_config():
    field, drive = stationary_setup()
    with pytest.raises(ValueError):
        evolve(field, drive, SolverConfig(dt=2e-3, t_end=0.0))
    with pytest.raises(ValueError):
        SolverConfig(dt=-1e-3, t_end=1.0)
    with pytest.raises(ValueError):
        SolverConfig(dt=2e-3, t_end=1.0, snapshot_times=(0.5, 0.2))
    with pytest.raises(ValueError):
        SolverConfig(dt=2e-3, t_end=1.0, boundary="periodic")


def test_evolve_enforces_modulation_resolution():
    field, _ = stationary_setup()
    sched = Schedule()  # Omega = 40 needs dt <= 2 pi / 800
    with pytest.raises(ValueError):
        evolve(field, sched, SolverConfig(dt=0.05, t_end=1.0))


def test_observables_csv_round_trip(tmp_path):
    field, drive = stationary_setup()
    cfg = SolverConfig(dt=2e-3, t_end=0.2, sample_stride=10)
    record = evolve(field, drive, cfg)
    path = tmp_path / "observables.csv"
    write_observables_csv(record, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ("t,peak,norm,E,rms_rho,rms_z,"
                        "cell_-2,cell_-1,cell_0,cell_1,cell_2")
    assert len(lines) == 1 + len(record.times)
    first = [float(tok) for tok in lines[1].split(",")]
    assert first[0] == 0.0
    assert first[1] == pytest.approx(record.peaks[0], rel=1e-15)
    # cells -2..2 all lie inside the 2-cell-wide domain here
    assert first[8] == pytest.approx(record.cell_series(0)[0], rel=1e-15)


def test_evolve_cell_series_and_energy_column(tmp_path):
    field, drive = stationary_setup()
    cfg = SolverConfig(dt=2e-3, t_end=0.5, sample_stride=25)
    record = evolve(field, drive, cfg)
    central = record.cell_series(0)
    assert len(central) == len(record.times)
    assert record.cell_series(99).max() == 0.0
