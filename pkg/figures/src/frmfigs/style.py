"""Shared rendering setup: headless backend, fixed style, deterministic save."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

DPI = 150

#: One face color per verdict label; Failed cells additionally hatched.
VERDICT_COLORS = {
    "Stable": "#2e7d32",
    "Collapse": "#c62828",
    "Expand": "#6a1b9a",
    "Decay": "#ef6c00",
    "Indeterminate": "#9e9e9e",
    "Failed": "#eeeeee",
}


def save_figure(fig, out_path) -> None:
    """Write the figure with fixed parameters so bytes are reproducible."""
    fig.savefig(out_path, dpi=DPI, facecolor="white",
                metadata={"Software": "frmfigs"})
    plt.close(fig)
