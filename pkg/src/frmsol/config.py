"""Run configuration: a flat INI document with typed, validated keys.

Sections: [schedule], [endcap], [grid], [solver], [criteria], [run],
and optionally [sweep].  Every key is optional (defaults reproduce the
reference setup) but unknown sections or keys are rejected, as are
values of the wrong type.  Overrides of the form ``section.key=value``
are applied before typing, so they obey the same schema.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .analysis import StabilityCriteria
from .core import Grid, PI
from .gpe import SolverConfig
from .schedule import EndCap, Schedule
from .sweep import Axis, SweepSpec, parse_links


class ConfigError(ValueError):
    """A configuration file or override that cannot be used."""


def _float_list(text: str):
    items = text.replace(",", " ").split()
    return tuple(float(tok) for tok in items)


_SCHEMA = {
    "schedule": {key: float for key in (
        "g_init", "g0f_abs", "g1f", "omega_frm", "eps_f", "omega_perp0",
        "t1", "t2", "t3", "t4")},
    "endcap": {"z_cap": float, "height": float},
    "grid": {"n_rho": int, "n_z": int, "rho_max": float, "z_max_pi": float},
    "solver": {"dt": float, "t_end": float, "snapshot_times": _float_list,
               "boundary": str, "imag_time_tol": float, "imag_dt": float,
               "max_imag_iters": int, "sample_stride": int, "backend": str},
    "criteria": {"window_fraction": float, "max_breathing_ratio": float,
                 "min_cell_retention": float, "max_trend": float},
    "run": {"e_number": float},
    "sweep": {"x_name": str, "x_min": float, "x_max": float, "x_count": int,
              "y_name": str, "y_min": float, "y_max": float, "y_count": int,
              "runner": str, "links": str},
}

_SWEEP_REQUIRED = ("x_name", "x_min", "x_max", "x_count",
                   "y_name", "y_min", "y_max", "y_count", "runner")


@dataclass
class Config:
    """Typed view of one configuration document."""

    schedule: Schedule
    grid: Grid
    solver: SolverConfig
    criteria: StabilityCriteria
    cap: EndCap | None
    e_number: float
    sweep: SweepSpec | None


def _typed_sections(parser: configparser.ConfigParser) -> dict:
    values: dict = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; expected one of "
                f"{sorted(_SCHEMA)}")
        schema = _SCHEMA[section]
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}]; expected one of "
                    f"{sorted(schema)}")
            try:
                values[section][key] = schema[key](raw)
            except ValueError:
                raise ConfigError(
                    f"bad value for {section}.{key}: {raw!r} is not "
                    f"{schema[key].__name__}") from None
    return values


def apply_overrides(parser: configparser.ConfigParser, overrides) -> None:
    """Apply ``section.key=value`` strings onto the raw document."""
    for item in overrides:
        head, sep, value = item.partition("=")
        section, dot, key = head.partition(".")
        if not sep or not dot or not section or not key:
            raise ConfigError(
                f"bad override {item!r}; expected section.key=value")
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(
                f"bad override {item!r}: no such setting "
                f"{section}.{key}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)


def _build(values: dict) -> Config:
    def section(name):
        return dict(values.get(name, {}))

    try:
        schedule = Schedule(**section("schedule"))
        grid_kwargs = section("grid")
        z_max_pi = grid_kwargs.pop("z_max_pi", 8.0)
        grid = Grid(grid_kwargs.pop("n_rho", 64), grid_kwargs.pop("n_z", 512),
                    grid_kwargs.pop("rho_max", 8.0), z_max_pi * PI)
        solver = SolverConfig(**section("solver"))
        criteria = StabilityCriteria(**section("criteria"))
        cap_kwargs = section("endcap")
        height = cap_kwargs.pop("height", 1.0e3)
        z_cap = cap_kwargs.pop("z_cap", grid.z_max - 0.5 * PI)
        cap = EndCap(z_cap, height) if height > 0.0 else None
        e_number = section("run").get("e_number", 1.0)
        if e_number <= 0.0:
            raise ValueError("run.e_number must be positive")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None

    sweep_values = section("sweep")
    sweep = None
    if sweep_values:
        missing = [key for key in _SWEEP_REQUIRED if key not in sweep_values]
        if missing:
            raise ConfigError(
                f"[sweep] is missing required keys: {', '.join(missing)}")
        try:
            links = parse_links(sweep_values.get("links", ""))
            sweep = SweepSpec(
                axis_x=Axis(sweep_values["x_name"], sweep_values["x_min"],
                            sweep_values["x_max"], sweep_values["x_count"]),
                axis_y=Axis(sweep_values["y_name"], sweep_values["y_min"],
                            sweep_values["y_max"], sweep_values["y_count"]),
                runner=sweep_values["runner"],
                base_schedule=schedule, base_solver=solver, grid=grid,
                e_number=e_number, cap=cap, criteria=criteria, links=links)
        except ValueError as exc:
            raise ConfigError(f"[sweep] {exc}") from None

    return Config(schedule, grid, solver, criteria, cap, e_number, sweep)


def parse_config(path, overrides=()) -> Config:
    """Load, override, type-check, and assemble a configuration."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"))
    if path is not None:
        file_path = Path(path)
        if not file_path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(file_path) as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
    apply_overrides(parser, overrides)
    return _build(_typed_sections(parser))


def default_config() -> Config:
    """The configuration an empty document produces."""
    return parse_config(None)
