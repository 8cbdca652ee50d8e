"""Cylindrical grids, complex fields, and integral observables.

The field is stored on an axisymmetric (rho, z) mesh.  Both axes are
cell-centered: no radial node sits on the coordinate singularity at
rho = 0, and no axial node sits on a lattice-cell boundary.  All
integrals use the midpoint rule, which is consistent with that storage
and second-order accurate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

PI = math.pi
#: Axial period of the lattice potential; cell m is centered at z = m*pi.
CELL_PERIOD = math.pi
#: Converts the integrated density to the dimensionless atom-number scale.
E_NUMBER_FACTOR = PI ** -1.5

#: Binary layout of snapshot payloads: little-endian complex128.
SNAPSHOT_DTYPE = np.dtype("<c16")


class Verdict(str, Enum):
    """Outcome labels shared by the trajectory and field classifiers."""

    STABLE = "Stable"
    COLLAPSE = "Collapse"
    EXPAND = "Expand"
    DECAY = "Decay"
    INDETERMINATE = "Indeterminate"
    FAILED = "Failed"

    def __str__(self):
        return self.value


@dataclass(eq=False)
class Grid:
    """Axisymmetric mesh: rho_j = (j + 1/2) d_rho, z_k = -z_max + (k + 1/2) d_z.

    The axial extent must hold a whole number of lattice cells, so z_max
    is required to be an integer multiple of pi (within 1e-12).
    """

    n_rho: int
    n_z: int
    rho_max: float
    z_max: float

    def __post_init__(self):
        if self.n_rho < 8:
            raise ValueError(f"n_rho must be at least 8, got {self.n_rho}")
        if self.n_z < 16:
            raise ValueError(f"n_z must be at least 16, got {self.n_z}")
        if not (self.rho_max > 0.0 and self.z_max > 0.0):
            raise ValueError("grid extents must be positive")
        cells = round(self.z_max / PI)
        if cells < 1 or abs(self.z_max - cells * PI) > 1e-12:
            raise ValueError(
                f"z_max must be an integer multiple of pi, got {self.z_max!r}")
        self.d_rho = self.rho_max / self.n_rho
        self.d_z = 2.0 * self.z_max / self.n_z
        self.rho = (np.arange(self.n_rho) + 0.5) * self.d_rho
        self.z = -self.z_max + (np.arange(self.n_z) + 0.5) * self.d_z

    @property
    def shape(self):
        return (self.n_rho, self.n_z)

    @property
    def max_cell_index(self) -> int:
        """Largest lattice-cell index m; cells run from -m to +m."""
        return round(self.z_max / PI)

    def cell_indices(self) -> np.ndarray:
        """Lattice-cell index of every axial node.

        A node exactly on a boundary (m + 1/2)*pi is assigned by
        round-half-to-even, which is deterministic and symmetric in z.
        """
        m = self.max_cell_index
        return np.clip(np.rint(self.z / PI).astype(int), -m, m)

    def cell_boundaries(self) -> np.ndarray:
        """Axial cell edges, clipped to the domain: 2*max_cell_index + 2 values."""
        m = self.max_cell_index
        inner = (np.arange(-m, m) + 0.5) * PI
        return np.concatenate(([-self.z_max], inner, [self.z_max]))


def make_grid(n_rho: int, n_z: int, rho_max: float, z_max: float) -> Grid:
    """Construct a validated grid."""
    return Grid(n_rho, n_z, rho_max, z_max)


@dataclass(eq=False)
class Field:
    """Complex field sampled on a grid, tagged with its physical time."""

    values: np.ndarray
    grid: Grid
    time: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"shape {self.grid.shape}")

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid, self.time)


def discrete_norm(values: np.ndarray, grid: Grid) -> float:
    """Midpoint-rule norm integral 2*pi * sum |psi|^2 rho drho dz."""
    abs2 = values.real ** 2 + values.imag ** 2
    return float(2.0 * PI * grid.d_rho * grid.d_z * (grid.rho @ abs2).sum())


def norm(field: Field) -> float:
    """Integral of |psi|^2 over the cylinder; rejects non-finite fields."""
    if not np.all(np.isfinite(field.values)):
        raise ValueError("field contains non-finite entries")
    return discrete_norm(field.values, field.grid)


@dataclass
class Observables:
    """Scalar diagnostics of one field sample.

    ``cell_norms[m + max_cell_index]`` is the norm share of lattice cell m;
    the entries sum to ``norm`` exactly (every node belongs to one cell).
    """

    peak_amplitude: float
    norm: float
    e_number: float
    rms_rho: float
    rms_z: float
    cell_norms: np.ndarray
    max_cell_index: int

    def cell_norm(self, m: int) -> float:
        """Norm in lattice cell m; 0.0 for cells outside the domain."""
        idx = m + self.max_cell_index
        if 0 <= idx < len(self.cell_norms):
            return float(self.cell_norms[idx])
        return 0.0


def observables(field: Field, cell_boundaries: np.ndarray | None = None) -> Observables:
    """Compute peak amplitude, norm, widths, and per-cell norm shares.

    ``cell_boundaries`` defaults to the lattice-cell edges of the grid;
    an explicit argument must describe the same partition.
    """
    grid = field.grid
    if cell_boundaries is not None:
        expected = grid.cell_boundaries()
        given = np.asarray(cell_boundaries, dtype=float)
        if given.shape != expected.shape or np.max(np.abs(given - expected)) > 1e-9:
            raise ValueError("cell boundaries must match the lattice partition")

    vals = field.values
    abs2 = vals.real ** 2 + vals.imag ** 2
    weight = 2.0 * PI * grid.d_rho * grid.d_z
    # Linear density along z (already radially integrated).
    line = weight * (grid.rho @ abs2)
    total = float(line.sum())
    peak = float(math.sqrt(abs2.max()))
    m = grid.max_cell_index
    cells = np.bincount(grid.cell_indices() + m, weights=line,
                        minlength=2 * m + 1)

    if total <= 0.0:
        return Observables(peak, 0.0, 0.0, 0.0, 0.0, cells, m)

    rho_sq = float(weight * ((grid.rho ** 3) @ abs2).sum()) / total
    z_mean = float((grid.z * line).sum()) / total
    z_sq = float(((grid.z - z_mean) ** 2 * line).sum()) / total
    return Observables(peak, total, total * E_NUMBER_FACTOR,
                       math.sqrt(rho_sq), math.sqrt(z_sq), cells, m)


def write_snapshot(field: Field, path) -> None:
    """Write a field snapshot: 4-line ASCII header + raw complex128 payload.

    Header lines: n_rho, n_z, "rho_max z_max", time.  Floats use repr,
    which round-trips exactly.  The payload is row-major with rho as the
    outer (slow) axis, little-endian.
    """
    grid = field.grid
    header = (f"{grid.n_rho}\n{grid.n_z}\n"
              f"{grid.rho_max!r} {grid.z_max!r}\n{field.time!r}\n")
    payload = np.ascontiguousarray(field.values, dtype=SNAPSHOT_DTYPE)
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def read_snapshot(path) -> Field:
    """Read a snapshot written by :func:`write_snapshot`."""
    raw = Path(path).read_bytes()
    offset = 0
    lines = []
    for _ in range(4):
        end = raw.find(b"\n", offset)
        if end < 0:
            raise ValueError(f"corrupt snapshot header in {path}")
        lines.append(raw[offset:end].decode("ascii", errors="replace"))
        offset = end + 1
    try:
        n_rho = int(lines[0])
        n_z = int(lines[1])
        rho_max, z_max = (float(tok) for tok in lines[2].split())
        time = float(lines[3])
    except ValueError as exc:
        raise ValueError(f"corrupt snapshot header in {path}: {exc}") from None
    expected = n_rho * n_z * SNAPSHOT_DTYPE.itemsize
    if len(raw) - offset != expected:
        raise ValueError(
            f"snapshot payload in {path} has {len(raw) - offset} bytes, "
            f"expected {expected}")
    grid = Grid(n_rho, n_z, rho_max, z_max)
    values = np.frombuffer(raw, dtype=SNAPSHOT_DTYPE, count=n_rho * n_z,
                           offset=offset).reshape(n_rho, n_z)
    return Field(values.astype(np.complex128), grid, time)
