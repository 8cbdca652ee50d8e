"""Two-parameter stability maps over the schedule parameters.

Each grid point perturbs the base schedule (or the atom-number scale),
applies the derived couplings, runs the chosen model (width equations or
full field propagation), and stores a verdict.  A failed point records
Verdict.FAILED instead of aborting the sweep, so maps are always
complete and deterministic.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, field as dataclass_field, fields, replace

import numpy as np

from . import variational
from .analysis import StabilityCriteria
from .core import Grid, PI, Verdict
from .gpe import SolverConfig, evolve, prepare_initial_state
from .schedule import EndCap, FrmStage, Schedule

_SCHEDULE_FIELDS = {f.name for f in fields(Schedule)}
#: Names an axis or coupling may address.
PARAMETER_NAMES = _SCHEDULE_FIELDS | {"e_number"}


@dataclass(frozen=True)
class Axis:
    """One swept parameter: ``count`` evenly spaced values on [lo, hi]."""

    name: str
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.name not in PARAMETER_NAMES:
            raise ValueError(
                f"unknown sweep parameter {self.name!r}; expected a "
                f"schedule field or 'e_number'")
        if self.count < 1:
            raise ValueError("axis count must be at least 1")
        if self.hi < self.lo:
            raise ValueError("axis upper bound must not be below the lower")
        if self.count == 1 and self.hi != self.lo:
            raise ValueError("a single-point axis needs lo == hi")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class Link:
    """Derived coupling ``target = factor * source``, applied per point."""

    target: str
    factor: float
    source: str

    def __post_init__(self):
        for name in (self.target, self.source):
            if name not in PARAMETER_NAMES:
                raise ValueError(f"unknown coupling parameter {name!r}")
        if self.target == self.source:
            raise ValueError("coupling target and source must differ")


def parse_links(spec: str) -> tuple:
    """Parse couplings like ``"g1f=4*g0f_abs; t4=1*t3"`` (';'-separated)."""
    links = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            target, expr = part.split("=")
            factor, source = expr.split("*")
            links.append(Link(target.strip(), float(factor), source.strip()))
        except ValueError as exc:
            raise ValueError(
                f"bad coupling {part!r}; expected 'target=factor*source'"
            ) from exc
    targets = [link.target for link in links]
    if len(set(targets)) != len(targets):
        raise ValueError("each coupling target may appear only once")
    return tuple(links)


_RUNNERS = ("VA", "GPE")


@dataclass(frozen=True)
class SweepSpec:
    """Full description of one stability map."""

    axis_x: Axis
    axis_y: Axis
    runner: str
    base_schedule: Schedule = dataclass_field(default_factory=Schedule)
    base_solver: SolverConfig = dataclass_field(default_factory=SolverConfig)
    grid: Grid | None = None
    e_number: float = 1.0
    cap: EndCap | None = None
    criteria: StabilityCriteria = dataclass_field(
        default_factory=StabilityCriteria)
    links: tuple = ()

    def __post_init__(self):
        if self.runner not in _RUNNERS:
            raise ValueError(
                f"unknown runner {self.runner!r}; expected one of {_RUNNERS}")
        if self.axis_x.name == self.axis_y.name:
            raise ValueError("the two axes must sweep different parameters")
        if self.e_number <= 0.0:
            raise ValueError("e_number must be positive")
        if self.runner == "GPE" and self.grid is None:
            raise ValueError("the GPE runner needs a grid")
        for link in self.links:
            if link.target in (self.axis_x.name, self.axis_y.name):
                raise ValueError(
                    f"coupling target {link.target!r} is already swept by "
                    "an axis")


def _point_parameters(spec: SweepSpec, x: float, y: float):
    """Schedule and atom-number scale at one sweep point."""
    updates = {}
    e_number = spec.e_number
    for name, value in ((spec.axis_x.name, x), (spec.axis_y.name, y)):
        if name == "e_number":
            e_number = value
        else:
            updates[name] = value
    schedule = replace(spec.base_schedule, **updates)
    for link in spec.links:
        source = (e_number if link.source == "e_number"
                  else getattr(schedule, link.source))
        value = link.factor * source
        if link.target == "e_number":
            e_number = value
        else:
            schedule = replace(schedule, **{link.target: value})
    if e_number <= 0.0:
        raise ValueError("sweep point produced a non-positive e_number")
    return schedule, e_number


def va_time_step(omega_frm: float) -> float:
    """Width-equation step: at least 50 samples per modulation period."""
    return min(0.01, 2.0 * PI / omega_frm / 50.0)


def _run_va_point(spec: SweepSpec, schedule: Schedule, e_number: float) -> Verdict:
    stage = schedule.final_stage()
    init = variational.initial_state(stage.eps_f, e_number, stage.g0f_abs,
                                     stage.g1f, stage.omega_frm)
    params = variational.VaParams(e_number, stage)
    trajectory = variational.va_integrate(
        init, params, spec.base_solver.t_end,
        va_time_step(stage.omega_frm))
    return variational.va_classify(trajectory,
                                   spec.criteria.window_fraction)


def _run_gpe_point(spec: SweepSpec, schedule: Schedule, e_number: float) -> Verdict:
    solver = spec.base_solver
    dt = min(solver.dt, 2.0 * PI / schedule.omega_frm / 20.0)
    solver = replace(solver, dt=dt, snapshot_times=())
    state = prepare_initial_state(
        spec.grid, schedule, e_number, spec.cap,
        imag_dt=solver.imag_dt, tol=solver.imag_time_tol,
        max_iters=solver.max_imag_iters, backend=solver.backend)
    record = evolve(state, schedule, solver, spec.cap, spec.criteria)
    return record.verdict


def evaluate_point(spec: SweepSpec, x: float, y: float):
    """Verdict and wall time of a single sweep point; never raises."""
    start = time.perf_counter()
    try:
        schedule, e_number = _point_parameters(spec, x, y)
        if spec.runner == "VA":
            verdict = _run_va_point(spec, schedule, e_number)
        else:
            verdict = _run_gpe_point(spec, schedule, e_number)
    except Exception:
        verdict = Verdict.FAILED
    return verdict, time.perf_counter() - start


@dataclass
class StabilityMap:
    """Verdict grid indexed [ix, iy] following the axis value order."""

    spec: SweepSpec
    x_values: np.ndarray
    y_values: np.ndarray
    verdicts: list
    runtimes: np.ndarray

    def verdict_at(self, ix: int, iy: int) -> Verdict:
        return self.verdicts[ix][iy]

    def counts(self) -> dict:
        flat = [v for row in self.verdicts for v in row]
        return {v: flat.count(v) for v in Verdict if v in flat}


def run_sweep(spec: SweepSpec, jobs: int = 1) -> StabilityMap:
    """Evaluate every sweep point; identical results for any job count."""
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    xs = spec.axis_x.values()
    ys = spec.axis_y.values()
    points = [(spec, float(x), float(y)) for x in xs for y in ys]
    if jobs > 1:
        with multiprocessing.Pool(jobs) as pool:
            results = pool.starmap(evaluate_point, points)
    else:
        results = [evaluate_point(*p) for p in points]
    verdicts = [[Verdict.FAILED] * len(ys) for _ in xs]
    runtimes = np.zeros((len(xs), len(ys)))
    for flat_idx, (verdict, runtime) in enumerate(results):
        ix, iy = divmod(flat_idx, len(ys))
        verdicts[ix][iy] = verdict
        runtimes[ix, iy] = runtime
    return StabilityMap(spec, xs, ys, verdicts, runtimes)


def write_map_csv(stability_map: StabilityMap, path) -> None:
    """Write rows ``x,y,verdict,runtime_s`` in x-major order.

    The first two header names are the actual swept parameter names.
    Everything except runtime_s is deterministic for a given spec.
    """
    spec = stability_map.spec
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{spec.axis_x.name},{spec.axis_y.name},verdict,runtime_s\n")
        for ix, x in enumerate(stability_map.x_values):
            for iy, y in enumerate(stability_map.y_values):
                fh.write(f"{x:.17g},{y:.17g},"
                         f"{stability_map.verdicts[ix][iy]},"
                         f"{stability_map.runtimes[ix, iy]:.6f}\n")
