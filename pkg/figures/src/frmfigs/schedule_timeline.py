"""Render the protocol timeline: g(t), lattice depth, and trap frequency.

The curves are evaluated from the [schedule] section of a run
configuration.  Stage boundaries are marked and the span with the
modulated interaction is shaded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .formats import FormatError, read_schedule_config
from .style import plt, save_figure


def g_curve(p: dict, t: np.ndarray) -> np.ndarray:
    """Interaction coefficient along the protocol."""
    ramp_down = p["g_init"] * (p["t2"] - t) / (p["t2"] - p["t1"])
    drive = -p["g0f_abs"] + p["g1f"] * np.sin(p["omega_frm"] * t)
    turn_on = (t - p["t3"]) / (p["t4"] - p["t3"])
    return np.select(
        [t <= p["t1"], t <= p["t2"], t <= p["t3"], t < p["t4"]],
        [p["g_init"], ramp_down, 0.0, turn_on * drive],
        default=drive)


def epsilon_curve(p: dict, t: np.ndarray) -> np.ndarray:
    """Lattice depth: linear ramp to eps_f over [0, t2]."""
    return p["eps_f"] * np.clip(t / p["t2"], 0.0, 1.0)


def omega_perp_curve(p: dict, t: np.ndarray) -> np.ndarray:
    """Trap frequency: constant to t3, released linearly by t4."""
    return p["omega_perp0"] * np.clip((p["t4"] - t) / (p["t4"] - p["t3"]),
                                      0.0, 1.0)


def render(params: dict, out_path) -> None:
    t_max = 1.25 * params["t4"]
    # Enough samples to resolve every modulation cycle in the drawing.
    cycles = params["omega_frm"] * t_max / (2.0 * np.pi)
    n = max(4000, int(40 * cycles))
    t = np.linspace(0.0, t_max, n)

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7.0, 7.0))
    curves = (
        (g_curve, "interaction g(t)"),
        (epsilon_curve, "lattice depth"),
        (omega_perp_curve, "trap frequency"),
    )
    for ax, (curve, label) in zip(axes, curves):
        ax.plot(t, curve(params, t), lw=0.7, color="#1a5276")
        ax.set_ylabel(label)
        ax.axvspan(params["t3"], t_max, color="#f1c40f", alpha=0.12,
                   lw=0)
        for marker in ("t1", "t2", "t3", "t4"):
            ax.axvline(params[marker], color="0.4", ls=":", lw=0.8)
    axes[0].set_title("protocol stages (modulated span shaded)")
    axes[-1].set_xlabel("t")
    axes[-1].set_xlim(0.0, t_max)
    fig.align_ylabels(axes)
    save_figure(fig, out_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frmfig-schedule", description=__doc__)
    parser.add_argument("--in", dest="config", required=True, metavar="CFG",
                        help="run configuration with a [schedule] section")
    parser.add_argument("--out", required=True, metavar="IMAGE",
                        help="output image path")
    args = parser.parse_args(argv)
    try:
        render(read_schedule_config(args.config), args.out)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
