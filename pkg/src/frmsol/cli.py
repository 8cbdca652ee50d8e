"""Command-line interface.

Subcommands: ``threshold`` (analytic existence limits), ``va`` (width
equations at the established stage), ``gpe`` (full protocol run),
``sweep`` (stability map), ``isolate`` (cell-removal experiment).

Exit codes: 0 success, 1 configuration or validation failure, 2 runtime
failure, 3 indeterminate result under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import variational
from .analysis import cell_isolation_experiment
from .config import ConfigError, parse_config
from .core import Verdict, read_snapshot
from .gpe import evolve, prepare_initial_state, write_observables_csv
from .sweep import run_sweep, va_time_step, write_map_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_INDETERMINATE = 3


def _common_options(parser: argparse.ArgumentParser, config_required=True):
    parser.add_argument("--config", required=config_required, metavar="PATH",
                        help="configuration file (INI)")
    parser.add_argument("--override", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override one setting; repeatable")
    parser.add_argument("--out", metavar="DIR",
                        help="directory for output artifacts")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="worker processes where supported")
    parser.add_argument("--strict", action="store_true",
                        help="exit with status 3 on an indeterminate result")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frmsol",
        description="Condensate stability under a quasi-1D lattice with "
                    "rapidly modulated attraction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_thr = sub.add_parser(
        "threshold", help="print the analytic existence limits",
        description="Lattice depth threshold, pinned axial widths, and the "
                    "minimum mean attraction for the given depth and "
                    "atom-number scale.")
    p_thr.add_argument("--epsilon", type=float, required=True,
                       help="lattice depth")
    p_thr.add_argument("--E", type=float, default=1.0, dest="e_number",
                       help="atom-number scale (default 1)")
    p_thr.add_argument("--out", metavar="DIR",
                       help="directory for threshold.json")
    p_thr.set_defaults(func=cmd_threshold)

    p_va = sub.add_parser(
        "va", help="integrate the width equations",
        description="Integrate the Gaussian-ansatz width equations at the "
                    "established stage of the configured schedule and "
                    "classify the trajectory.")
    _common_options(p_va)
    p_va.set_defaults(func=cmd_va)

    p_gpe = sub.add_parser(
        "gpe", help="run the full field propagation",
        description="Prepare the ground state, run the whole protocol, "
                    "classify the outcome, and write observables and "
                    "snapshots.")
    _common_options(p_gpe)
    p_gpe.set_defaults(func=cmd_gpe)

    p_sweep = sub.add_parser(
        "sweep", help="run a two-parameter stability map",
        description="Evaluate the [sweep] section of the configuration and "
                    "write the verdict map.")
    _common_options(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_iso = sub.add_parser(
        "isolate", help="re-run a snapshot with chosen cells emptied",
        description="Clear the listed lattice cells from a snapshot and "
                    "compare the surviving central cell against the "
                    "unmodified field.")
    _common_options(p_iso)
    p_iso.add_argument("--snapshot", required=True, metavar="PATH",
                       help="snapshot file to start from")
    p_iso.add_argument("--cells", required=True, metavar="LIST",
                       help="comma-separated cell indices to clear, "
                            "e.g. '-2,-1,1,2'")
    p_iso.add_argument("--horizon", type=float, default=200.0, metavar="T",
                       help="comparison horizon after the snapshot time")
    p_iso.set_defaults(func=cmd_isolate)
    return parser


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_threshold(args) -> int:
    thr = variational.epsilon_threshold()
    roots = variational.solve_v0(args.epsilon)
    print(f"epsilon_threshold = {thr:.12g}")
    if not roots:
        print(f"epsilon = {args.epsilon:g} is below the threshold: "
              "no pinned axial width")
        g_min = None
    else:
        print("pinned axial widths V0 = "
              + ", ".join(f"{r:.12g}" for r in roots))
        if args.epsilon > thr:
            g_min = variational.g0_min(args.epsilon, args.e_number)
            print(f"g0_min(epsilon={args.epsilon:g}, E={args.e_number:g}) "
                  f"= {g_min:.12g}")
        else:
            g_min = None
            print("depth is exactly at threshold; the pinned width is "
                  "marginal and g0_min diverges in practice")
    out = _out_dir(args)
    if out is not None:
        _write_json(out / "threshold.json", {
            "epsilon": args.epsilon, "e_number": args.e_number,
            "epsilon_threshold": thr, "v0_roots": roots, "g0_min": g_min})
    return EXIT_OK


def cmd_va(args) -> int:
    cfg = parse_config(args.config, args.override)
    stage = cfg.schedule.final_stage()
    init = variational.initial_state(stage.eps_f, cfg.e_number,
                                     stage.g0f_abs, stage.g1f,
                                     stage.omega_frm)
    params = variational.VaParams(cfg.e_number, stage)
    trajectory = variational.va_integrate(
        init, params, cfg.solver.t_end, va_time_step(stage.omega_frm))
    verdict = variational.va_classify(trajectory,
                                      cfg.criteria.window_fraction)
    print(f"verdict: {verdict}")
    if len(trajectory.t):
        print(f"W in [{trajectory.w.min():.6g}, {trajectory.w.max():.6g}], "
              f"V in [{trajectory.v.min():.6g}, {trajectory.v.max():.6g}] "
              f"over t <= {trajectory.t[-1]:g}")
    out = _out_dir(args)
    if out is not None:
        variational.write_trajectory_csv(trajectory, out / "va_trajectory.csv")
        _write_json(out / "va_result.json", {
            "verdict": str(verdict), "e_number": cfg.e_number,
            "g0f_abs": stage.g0f_abs, "g1f": stage.g1f,
            "omega_frm": stage.omega_frm, "eps_f": stage.eps_f,
            "t_end": cfg.solver.t_end, "note": trajectory.note})
    if args.strict and verdict is Verdict.INDETERMINATE:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_gpe(args) -> int:
    cfg = parse_config(args.config, args.override)
    out = _out_dir(args)
    state = prepare_initial_state(
        cfg.grid, cfg.schedule, cfg.e_number, cfg.cap,
        imag_dt=cfg.solver.imag_dt, tol=cfg.solver.imag_time_tol,
        max_iters=cfg.solver.max_imag_iters, backend=cfg.solver.backend)
    record = evolve(state, cfg.schedule, cfg.solver, cfg.cap, cfg.criteria,
                    out_dir=out)
    print(f"verdict: {record.verdict}")
    print(f"norm drift after t4: {record.norm_drift:.3e}")
    print(f"final peak amplitude: {record.peaks[-1]:.6g}")
    if out is not None:
        write_observables_csv(record, out / "observables.csv")
        _write_json(out / "run_result.json", {
            "verdict": str(record.verdict),
            "norm_drift": record.norm_drift,
            "aborted": record.aborted,
            "e_number": cfg.e_number,
            "t_end": cfg.solver.t_end})
    if args.strict and record.verdict is Verdict.INDETERMINATE:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = parse_config(args.config, args.override)
    if cfg.sweep is None:
        raise ConfigError("the configuration has no [sweep] section")
    stability_map = run_sweep(cfg.sweep, jobs=args.jobs)
    counts = stability_map.counts()
    total = len(stability_map.x_values) * len(stability_map.y_values)
    print(f"{total} points: "
          + ", ".join(f"{v}={n}" for v, n in counts.items()))
    out = _out_dir(args)
    if out is not None:
        write_map_csv(stability_map, out / "stability_map.csv")
    if args.strict and counts.get(Verdict.INDETERMINATE, 0) == total:
        return EXIT_INDETERMINATE
    return EXIT_OK


def cmd_isolate(args) -> int:
    cfg = parse_config(args.config, args.override)
    field = read_snapshot(args.snapshot)
    try:
        cells = [int(tok) for tok in args.cells.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"bad --cells value {args.cells!r}; expected "
                          "comma-separated integers") from None
    report = cell_isolation_experiment(field, cells, cfg.schedule,
                                       cfg.solver, cfg.cap,
                                       horizon=args.horizon)
    print(f"cleared cells {list(report.cleared)}; max relative deviation "
          f"of the central-cell peak: {report.max_rel_dev:.4g}")
    print("cleared cells refilled" if report.refilled
          else "cleared cells stayed empty")
    out = _out_dir(args)
    if out is not None:
        report.write_csv(out / "isolation.csv")
    return EXIT_OK


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # runtime failure: report, do not traceback
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
