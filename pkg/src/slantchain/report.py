"""Figure rendering for the report path.

Only the `report` CLI command imports this module; plain data export stays
free of any rendering dependency. Figures are written as PNG files next to
the delimited output.
"""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def curve_figure(levels, ts, path):
    """3-d view of a chain: every level plus the seed."""
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(projection="3d")
    for lvl in levels:
        pts = lvl.curve(ts)
        label = "seed" if lvl.level == 0 else f"level {lvl.level}"
        ax.plot(pts[:, 0], pts[:, 1], pts[:, 2], lw=1.0, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("z")
    ax.legend(loc="upper left", fontsize=8)
    ax.set_title(f"{levels[-1].operator}-chain, depth {levels[-1].level}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def weight_figure(levels, ts, path):
    """Phase and weight functions of each constructed level."""
    lifted = [lvl for lvl in levels if lvl.weight is not None]
    if not lifted:
        return None
    fig, axes = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    for lvl in lifted:
        axes[0].plot(ts, lvl.theta(ts), lw=1.0, label=f"level {lvl.level}")
        axes[1].plot(ts, lvl.weight(ts), lw=1.0, label=f"level {lvl.level}")
    axes[0].set_ylabel("phase")
    axes[1].set_ylabel("weight")
    axes[1].set_xlabel("parameter")
    axes[1].axhline(0.0, color="k", lw=0.5)
    for ax in axes:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def residual_figure(report, path):
    """Log-scale bar chart of check residuals against their tolerances."""
    names = [c.name for c in report.checks]
    residuals = [max(c.residual, 1e-18) for c in report.checks]
    tolerances = [c.tolerance for c in report.checks]
    colors = ["tab:green" if c.passed else "tab:red" for c in report.checks]
    fig, ax = plt.subplots(figsize=(7, 0.6 * len(names) + 1.5))
    y = np.arange(len(names))
    ax.barh(y, residuals, color=colors, height=0.6)
    ax.scatter(tolerances, y, marker="|", s=200, color="k", label="tolerance")
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("residual")
    ax.legend(fontsize=8)
    ax.invert_yaxis()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
