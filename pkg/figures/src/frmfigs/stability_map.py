"""Render a categorical stability heat map from a sweep CSV.

With --overlay-thresholds pointing at the solver's threshold JSON, the
relevant analytic boundary is drawn: the minimum mean attraction when
the x axis sweeps g0f_abs, or the lattice depth threshold when it
sweeps eps_f.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from matplotlib.patches import Patch, Rectangle

from .formats import (FormatError, read_thresholds, read_verdict_map)
from .style import VERDICT_COLORS, plt, save_figure


def _edges(values: np.ndarray) -> np.ndarray:
    """Cell boundaries around sorted sample positions."""
    if len(values) == 1:
        half = 0.5 if values[0] == 0.0 else 0.05 * abs(values[0]) + 0.5
        return np.array([values[0] - half, values[0] + half])
    mids = 0.5 * (values[1:] + values[:-1])
    first = values[0] - (mids[0] - values[0])
    last = values[-1] + (values[-1] - mids[-1])
    return np.concatenate([[first], mids, [last]])


def overlay_value(vmap, thresholds: dict) -> float:
    """The analytic boundary matching the map's x axis."""
    if vmap.x_name == "g0f_abs":
        value = thresholds.get("g0_min")
        if value is None:
            raise FormatError(
                "threshold file has no usable g0_min for the g0f_abs axis")
        return float(value)
    if vmap.x_name == "eps_f":
        value = thresholds.get("epsilon_threshold")
        if value is None:
            raise FormatError(
                "threshold file has no epsilon_threshold entry")
        return float(value)
    raise FormatError(
        f"no analytic overlay applies to the {vmap.x_name!r} axis")


def render(vmap, out_path, thresholds: dict | None = None) -> None:
    order = np.argsort(vmap.xs)
    xs = vmap.xs[order]
    y_order = np.argsort(vmap.ys)
    ys = vmap.ys[y_order]
    verdicts = vmap.verdicts[np.ix_(order, y_order)]
    x_edges = _edges(xs)
    y_edges = _edges(ys)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    seen = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            label = verdicts[i, j]
            if label not in seen:
                seen.append(label)
            ax.add_patch(Rectangle(
                (x_edges[i], y_edges[j]),
                x_edges[i + 1] - x_edges[i], y_edges[j + 1] - y_edges[j],
                facecolor=VERDICT_COLORS[label], edgecolor="white",
                lw=0.4, hatch="//" if label == "Failed" else None))
    ax.set_xlim(x_edges[0], x_edges[-1])
    ax.set_ylim(y_edges[0], y_edges[-1])
    ax.set_xlabel(vmap.x_name)
    ax.set_ylabel(vmap.y_name)

    handles = [Patch(facecolor=VERDICT_COLORS[label], edgecolor="0.5",
                     hatch="//" if label == "Failed" else None, label=label)
               for label in seen]
    if thresholds is not None:
        bound = overlay_value(vmap, thresholds)
        line = ax.axvline(bound, color="#1a5276", lw=1.6, ls="--")
        line.set_label("analytic bound")
        handles.append(line)
    ax.legend(handles=handles, loc="upper right", fontsize=8,
              framealpha=0.9)
    save_figure(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="frmfig-map", description=__doc__)
    parser.add_argument("--in", dest="csv", required=True, metavar="CSV",
                        help="sweep CSV (x,y,verdict,runtime_s)")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path")
    parser.add_argument("--overlay-thresholds", metavar="JSON",
                        help="threshold JSON from the solver's threshold "
                             "command; draws the analytic boundary")
    args = parser.parse_args(argv)
    try:
        thresholds = (read_thresholds(args.overlay_thresholds)
                      if args.overlay_thresholds else None)
        render(read_verdict_map(args.csv), args.out, thresholds)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
