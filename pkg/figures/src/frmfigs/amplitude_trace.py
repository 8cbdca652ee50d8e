"""Render the central peak amplitude over time from an observables CSV."""

from __future__ import annotations

import argparse
import sys

from .formats import FormatError, read_observables
from .style import plt, save_figure


def render(columns: dict, out_path, t4: float) -> None:
    t = columns["t"]
    peak = columns["peak"]
    fig, ax = plt.subplots(figsize=(7.0, 3.4))
    ax.plot(t, peak, lw=0.8, color="#1a5276")
    if t.min() <= t4 <= t.max():
        ax.axvline(t4, color="0.35", ls="--", lw=1.0)
        ax.annotate("protocol end", xy=(t4, ax.get_ylim()[1]),
                    xytext=(3, -12), textcoords="offset points",
                    fontsize=8, color="0.35")
    ax.set_xlabel("t")
    ax.set_ylabel("peak amplitude")
    ax.set_xlim(t.min(), t.max())
    save_figure(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frmfig-amplitude", description=__doc__)
    parser.add_argument("--in", dest="csv", required=True, metavar="CSV",
                        help="observables CSV with t and peak columns")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path")
    parser.add_argument("--t4", type=float, default=130.0, metavar="T",
                        help="protocol end to mark (default 130; ignored "
                             "when outside the data range)")
    args = parser.parse_args(argv)
    try:
        render(read_observables(args.csv), args.out, args.t4)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
