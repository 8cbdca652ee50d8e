"""Timing comparison of the propagation backends.

Runs the same real-time stepping loop with the compiled kernels and the
NumPy fallback on the reference grid and reports ms per step.  Invoke as
``python3 benchmarks/bench_kernels.py [--steps N]``.
"""

import argparse
import time

import numpy as np

from frmsol.core import make_grid
from frmsol.gpe import Stepper
from frmsol.kernels import default_name
from frmsol.schedule import EndCap, Schedule


def make_state(grid):
    rho = grid.rho[:, None]
    z = grid.z[None, :]
    psi = np.exp(-rho ** 2 / 2.0 - z ** 2 / 8.0) * (1.0 + 0.1j)
    return np.ascontiguousarray(psi, dtype=complex)


def time_backend(name, grid, cap, schedule, steps, warmup=10):
    stepper = Stepper(grid, cap, 2e-3, backend=name)
    values = make_state(grid)
    for i in range(warmup):
        stepper.advance(values, i * 2e-3, schedule)
    start = time.perf_counter()
    for i in range(steps):
        stepper.advance(values, (warmup + i) * 2e-3, schedule)
    elapsed = time.perf_counter() - start
    return 1e3 * elapsed / steps, values


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200,
                        help="timed steps per backend (default 200)")
    args = parser.parse_args()

    grid = make_grid(64, 512, 8.0, 8 * np.pi)
    cap = EndCap(z_cap=2.5 * np.pi)
    schedule = Schedule()
    print(f"grid {grid.n_rho}x{grid.n_z}, dt 2e-3, "
          f"{args.steps} steps per backend")
    print(f"default backend on this install: {default_name()}")

    results = {}
    for name in ("numpy", "cython"):
        try:
            per_step, values = time_backend(name, grid, cap, schedule,
                                            args.steps)
        except ImportError as exc:
            print(f"  {name:>6}: unavailable ({exc})")
            continue
        results[name] = (per_step, values)
        print(f"  {name:>6}: {per_step:8.3f} ms/step")

    if len(results) == 2:
        speedup = results["numpy"][0] / results["cython"][0]
        diff = np.max(np.abs(results["numpy"][1] - results["cython"][1]))
        print(f"speedup: {speedup:.2f}x, max state difference {diff:.3e}")


if __name__ == "__main__":
    main()
