"""Run classification and the cell-isolation experiment.

The classifier works on relative quantities only (ratios against the
protocol-end reference, normalized trends), so rescaling a field does
not change a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import Field, PI, Verdict
from .gpe import RunRecord, SolverConfig, Stepper

#: A cleared cell is declared refilled if it regains this fraction of the
#: surviving-cell norm; used only as a report diagnostic.
_REFILL_FRACTION = 0.25


@dataclass(frozen=True)
class StabilityCriteria:
    """Thresholds for :func:`classify_run`."""

    window_fraction: float = 0.25
    max_breathing_ratio: float = 3.0
    min_cell_retention: float = 0.5
    max_trend: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.window_fraction <= 1.0):
            raise ValueError("window_fraction must lie in (0, 1]")
        if self.max_breathing_ratio <= 1.0:
            raise ValueError("max_breathing_ratio must exceed 1")
        if not (0.0 < self.min_cell_retention < 1.0):
            raise ValueError("min_cell_retention must lie in (0, 1)")
        if self.max_trend <= 0.0:
            raise ValueError("max_trend must be positive")


def classify_run(record: RunRecord, criteria: StabilityCriteria | None = None
                 ) -> Verdict:
    """Label a propagation record.

    Collapse: the solver aborted, or the peak grew past 50x its value at
    the protocol end.  Decay: the central cell kept less than the
    retention fraction of its protocol-end norm.  Stable: over the
    trailing window the peak breathes less than the allowed ratio and
    its normalized linear trend stays small.  Anything else, including
    a record with fewer than 100 post-protocol samples, is
    Indeterminate.
    """
    if criteria is None:
        criteria = StabilityCriteria()
    if record.aborted:
        return Verdict.COLLAPSE

    t = record.times
    ref_idx = int(np.searchsorted(t, record.reference_time))
    if len(t) - ref_idx < 100:
        return Verdict.INDETERMINATE

    peak_ref = record.peaks[ref_idx]
    if peak_ref > 0.0 and np.max(record.peaks[ref_idx:]) > 50.0 * peak_ref:
        return Verdict.COLLAPSE

    cell0 = record.cell_series(0)
    if cell0[ref_idx] > 0.0 and cell0[-1] < criteria.min_cell_retention * cell0[ref_idx]:
        return Verdict.DECAY

    # Trailing window, never reaching back before the protocol end.
    t_start = max(record.reference_time,
                  t[-1] - criteria.window_fraction * (t[-1] - t[0]))
    w_idx = int(np.searchsorted(t, t_start))
    w_idx = min(w_idx, len(t) - 2)
    peak_win = record.peaks[w_idx:]
    t_win = t[w_idx:]
    p_lo = float(peak_win.min())
    p_hi = float(peak_win.max())
    mean = float(peak_win.mean())
    if p_lo <= 0.0 or mean <= 0.0:
        return Verdict.INDETERMINATE
    slope = float(np.polyfit(t_win, peak_win, 1)[0])
    trend = abs(slope) * (t_win[-1] - t_win[0]) / mean
    if p_hi / p_lo < criteria.max_breathing_ratio and trend < criteria.max_trend:
        return Verdict.STABLE
    return Verdict.INDETERMINATE


def _clearing_mask(grid, cells_to_clear) -> np.ndarray:
    """Axial multiplier that empties the listed cells.

    Each cleared cell contributes a smooth notch: cosine ramps of width
    d_z just inside the cell edges, zero across the rest of the cell.
    Surviving cells are left bit-identical; even a multiplier within
    rounding of 1 at the observation cell's edge would get amplified by
    the breather's phase sensitivity over a long horizon.  The notches
    are summed and clipped, so adjacent cleared cells merge into one
    flat-bottomed notch.
    """
    z = grid.z
    ramp = grid.d_z
    removed = np.zeros_like(z)
    for m in cells_to_clear:
        center = m * PI
        lo = center - 0.5 * PI
        hi = center + 0.5 * PI
        inside = np.clip(np.minimum(z - lo, hi - z) / ramp, 0.0, 1.0)
        removed += 0.5 * (1.0 - np.cos(PI * inside))
    return 1.0 - np.clip(removed, 0.0, 1.0)


@dataclass
class IsolationReport:
    """Peak series of the observation cell with and without the clearing."""

    times: np.ndarray
    peak_ref: np.ndarray
    peak_perturbed: np.ndarray
    rel_dev: np.ndarray
    max_rel_dev: float
    cleared: tuple
    refilled: bool

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write("t,peak_ref,peak_perturbed,rel_dev\n")
            for row in zip(self.times, self.peak_ref, self.peak_perturbed,
                           self.rel_dev):
                fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def cell_isolation_experiment(field: Field, cells_to_clear, schedule,
                              cfg: SolverConfig, cap=None,
                              horizon: float = 200.0,
                              observe_cell: int = 0) -> IsolationReport:
    """Empty the listed cells and compare the observed cell against a
    reference run of the unmodified field over the same horizon.

    The field should come from an established (post-protocol) state; the
    observed cell must not be cleared.  Returns the pointwise relative
    deviation of the observed cell's peak amplitude.
    """
    cells = tuple(sorted(set(int(m) for m in cells_to_clear)))
    if not cells:
        raise ValueError("cells_to_clear must not be empty")
    if observe_cell in cells:
        raise ValueError(
            f"cannot clear the observed cell {observe_cell}; at least "
            "that cell must survive")
    m_max = field.grid.max_cell_index
    for m in cells:
        if abs(m) > m_max:
            raise ValueError(f"cell {m} lies outside the grid (|m| <= {m_max})")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")

    grid = field.grid
    mask = _clearing_mask(grid, cells)
    cell_ids = grid.cell_indices()
    observe = cell_ids == observe_cell
    if not observe.any():
        raise ValueError(f"cell {observe_cell} has no grid nodes")

    n_steps = max(1, int(round(horizon / cfg.dt)))
    dt = horizon / n_steps
    stepper = Stepper(grid, cap, dt, backend=cfg.backend)
    in_cleared = np.isin(cell_ids, cells)

    def run(values):
        ts, peaks, cleared_peaks = [], [], []
        buf = values.copy()

        def record(t):
            abs2 = buf.real ** 2 + buf.imag ** 2
            ts.append(t)
            peaks.append(math.sqrt(abs2[:, observe].max()))
            cleared_peaks.append(math.sqrt(abs2[:, in_cleared].max()))

        record(field.time)
        for i in range(1, n_steps + 1):
            stepper.advance(buf, field.time + (i - 1) * dt, schedule)
            if i % cfg.sample_stride == 0 or i == n_steps:
                record(field.time + i * dt)
        return np.asarray(ts), np.asarray(peaks), np.asarray(cleared_peaks)

    sample_ts, peak_ref, _ = run(field.values)
    _, peak_pert, cleared_peak = run(field.values * mask)

    if np.min(peak_ref) <= 0.0:
        raise ValueError("reference run lost all amplitude in the observed "
                         "cell; nothing to compare")
    rel_dev = np.abs(peak_pert - peak_ref) / peak_ref
    refilled = bool(np.max(cleared_peak) > _REFILL_FRACTION * np.max(peak_pert))
    return IsolationReport(sample_ts, peak_ref, peak_pert, rel_dev,
                           float(rel_dev.max()), cells, refilled)
