"""Readers for the solver's artifact formats.

Snapshot: 4-line ASCII header (n_rho, n_z, "rho_max z_max", time)
followed by n_rho*n_z little-endian float64 (re, im) pairs, row-major
with rho outermost.  CSVs carry one header line.  Every reader
validates the schema and raises FormatError with the path in the
message.
"""

from __future__ import annotations

import configparser
import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class FormatError(ValueError):
    """An input artifact that does not match its declared format."""


@dataclass(frozen=True)
class Snapshot:
    """One field snapshot: |psi| is what the figures need."""

    n_rho: int
    n_z: int
    rho_max: float
    z_max: float
    time: float
    values: np.ndarray

    @property
    def rho(self) -> np.ndarray:
        """Cell-centered radial nodes."""
        d = self.rho_max / self.n_rho
        return (np.arange(self.n_rho) + 0.5) * d

    @property
    def z(self) -> np.ndarray:
        """Cell-centered axial nodes on (-z_max, z_max)."""
        d = 2.0 * self.z_max / self.n_z
        return -self.z_max + (np.arange(self.n_z) + 0.5) * d


def read_snapshot(path) -> Snapshot:
    raw = Path(path).read_bytes()
    offset = 0
    lines = []
    for _ in range(4):
        end = raw.find(b"\n", offset)
        if end < 0:
            raise FormatError(f"{path}: truncated snapshot header")
        lines.append(raw[offset:end].decode("ascii", errors="replace"))
        offset = end + 1
    try:
        n_rho = int(lines[0])
        n_z = int(lines[1])
        rho_max, z_max = (float(tok) for tok in lines[2].split())
        time = float(lines[3])
    except ValueError:
        raise FormatError(f"{path}: malformed snapshot header") from None
    if n_rho <= 0 or n_z <= 0 or rho_max <= 0.0 or z_max <= 0.0:
        raise FormatError(f"{path}: non-positive snapshot dimensions")
    expected = n_rho * n_z * 16
    if len(raw) - offset != expected:
        raise FormatError(
            f"{path}: payload has {len(raw) - offset} bytes, "
            f"expected {expected}")
    values = np.frombuffer(raw, dtype="<c16", count=n_rho * n_z,
                           offset=offset).reshape(n_rho, n_z)
    return Snapshot(n_rho, n_z, rho_max, z_max, time, values)


def _read_csv_columns(path, required) -> dict:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError(f"{path}: empty CSV") from None
            rows = list(reader)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from None
    missing = [name for name in required if name not in header]
    if missing:
        raise FormatError(
            f"{path}: missing columns {missing}; header is {header}")
    if not rows:
        raise FormatError(f"{path}: no data rows")
    columns = {name: [] for name in header}
    for row in rows:
        if len(row) != len(header):
            raise FormatError(f"{path}: ragged row {row}")
        for name, cell in zip(header, row):
            columns[name].append(cell)
    return columns


def read_observables(path) -> dict:
    """Observable series; 't' and 'peak' required, all columns numeric."""
    columns = _read_csv_columns(path, ("t", "peak"))
    try:
        return {name: np.array([float(x) for x in cells])
                for name, cells in columns.items()}
    except ValueError:
        raise FormatError(f"{path}: non-numeric observable cell") from None


@dataclass(frozen=True)
class VerdictMap:
    """Parsed stability map: verdict[i, j] belongs to (xs[i], ys[j])."""

    x_name: str
    y_name: str
    xs: np.ndarray
    ys: np.ndarray
    verdicts: np.ndarray


_VERDICT_LABELS = ("Stable", "Collapse", "Expand", "Decay",
                   "Indeterminate", "Failed")


def read_verdict_map(path) -> VerdictMap:
    """Sweep CSV: header `x_name,y_name,verdict,runtime_s`, x-major rows."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError(f"{path}: empty CSV") from None
            rows = list(reader)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if len(header) != 4 or header[2] != "verdict" or header[3] != "runtime_s":
        raise FormatError(
            f"{path}: expected header x,y,verdict,runtime_s, got {header}")
    x_name, y_name = header[0], header[1]
    if not rows:
        raise FormatError(f"{path}: no data rows")
    points = {}
    xs, ys = [], []
    for row in rows:
        if len(row) != 4:
            raise FormatError(f"{path}: ragged row {row}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            raise FormatError(f"{path}: non-numeric point {row}") from None
        if row[2] not in _VERDICT_LABELS:
            raise FormatError(f"{path}: unknown verdict {row[2]!r}")
        if x not in xs:
            xs.append(x)
        if y not in ys:
            ys.append(y)
        points[(x, y)] = row[2]
    if len(points) != len(xs) * len(ys):
        raise FormatError(f"{path}: rows do not fill a complete grid")
    verdicts = np.empty((len(xs), len(ys)), dtype=object)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            verdicts[i, j] = points[(x, y)]
    return VerdictMap(x_name, y_name, np.asarray(xs), np.asarray(ys),
                      verdicts)


#: Protocol parameters and their reference values; mirrors the solver's
#: configuration schema for the [schedule] section.
SCHEDULE_DEFAULTS = {
    "g_init": 10.0, "g0f_abs": 22.5, "g1f": 90.0, "omega_frm": 40.0,
    "eps_f": 25.0, "omega_perp0": 0.3,
    "t1": 30.0, "t2": 100.0, "t3": 120.0, "t4": 130.0,
}


def read_schedule_config(path) -> dict:
    """The [schedule] section of a run configuration, with defaults.

    Other sections are ignored; they belong to the solver.  Unknown keys
    inside [schedule] and non-numeric values are errors, as is a broken
    stage ordering.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"))
    file_path = Path(path)
    if not file_path.is_file():
        raise FormatError(f"config file not found: {path}")
    try:
        with open(file_path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise FormatError(f"{path}: {exc}") from None
    values = dict(SCHEDULE_DEFAULTS)
    if parser.has_section("schedule"):
        for key, raw in parser.items("schedule"):
            if key not in SCHEDULE_DEFAULTS:
                raise FormatError(
                    f"{path}: unknown schedule key {key!r}")
            try:
                values[key] = float(raw)
            except ValueError:
                raise FormatError(
                    f"{path}: schedule.{key} is not a number: {raw!r}"
                ) from None
    if not (0.0 < values["t1"] < values["t2"] <= values["t3"] < values["t4"]):
        raise FormatError(
            f"{path}: stage times must satisfy 0 < t1 < t2 <= t3 < t4")
    return values


def read_thresholds(path) -> dict:
    """Threshold JSON written by the solver's threshold command."""
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return payload
