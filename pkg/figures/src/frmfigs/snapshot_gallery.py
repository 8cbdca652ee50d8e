"""Render |psi(rho, z)| panels from field snapshots on a shared color scale."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .formats import FormatError, read_snapshot
from .style import plt, save_figure


def render(snapshots, out_path) -> None:
    first = snapshots[0]
    for snap in snapshots[1:]:
        same = (snap.n_rho == first.n_rho and snap.n_z == first.n_z
                and snap.rho_max == first.rho_max
                and snap.z_max == first.z_max)
        if not same:
            raise FormatError(
                "snapshots use different grids: "
                f"{snap.n_rho}x{snap.n_z} over ({snap.rho_max}, "
                f"{snap.z_max}) vs {first.n_rho}x{first.n_z} over "
                f"({first.rho_max}, {first.z_max})")

    amplitudes = [np.abs(s.values) for s in snapshots]
    vmax = max(a.max() for a in amplitudes)
    if vmax <= 0.0:
        vmax = 1.0

    n = len(snapshots)
    ncols = min(3, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(nrows, ncols, sharex=True, sharey=True,
                             figsize=(3.2 * ncols + 1.2, 2.6 * nrows),
                             squeeze=False)
    mesh = None
    for idx, (snap, amp) in enumerate(zip(snapshots, amplitudes)):
        ax = axes[idx // ncols][idx % ncols]
        mesh = ax.pcolormesh(snap.z, snap.rho, amp, vmin=0.0, vmax=vmax,
                             cmap="inferno", rasterized=True)
        ax.set_title(f"t = {snap.time:g}", fontsize=10)
        if idx % ncols == 0:
            ax.set_ylabel("rho")
        if idx // ncols == nrows - 1:
            ax.set_xlabel("z")
    for idx in range(n, nrows * ncols):
        axes[idx // ncols][idx % ncols].set_axis_off()
    fig.colorbar(mesh, ax=[ax for row in axes for ax in row],
                 label="|psi|", shrink=0.9)
    save_figure(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frmfig-gallery", description=__doc__)
    parser.add_argument("--in", dest="snapshots", required=True, nargs="+",
                        metavar="SNAPSHOT", help="snapshot files, in order")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path")
    args = parser.parse_args(argv)
    try:
        render([read_snapshot(p) for p in args.snapshots], args.out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
