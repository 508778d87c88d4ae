"""Figure rendering for sum traces and histogram/fit overlays.

All figures are written as SVG.  Output must be byte-identical across runs
and machines given identical inputs, so the SVG hash salt is pinned and the
date metadata is stripped.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

matplotlib.rcParams["svg.hashsalt"] = "rotsum"
matplotlib.rcParams["figure.figsize"] = (6.4, 4.0)
matplotlib.rcParams["axes.grid"] = True
matplotlib.rcParams["grid.alpha"] = 0.3

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}


def save_series_trace(times, values, path, title: str | None = None) -> None:
    fig, ax = plt.subplots()
    ax.plot(times, values, lw=0.6, color="tab:blue")
    ax.set_xlabel("t")
    ax.set_ylabel("S_t")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_histogram(histogram, path, overlays=None, title: str | None = None,
                   xlabel: str = "normalized value") -> None:
    """Bar plot of bin densities with optional fitted-density overlays
    given as (label, callable) pairs."""
    fig, ax = plt.subplots()
    widths = np.diff(histogram.edges)
    ax.bar(histogram.lefts, histogram.density, width=widths, align="edge",
           color="tab:gray", alpha=0.6, label="empirical")
    if overlays:
        xs = np.linspace(histogram.edges[0], histogram.edges[-1], 512)
        for label, pdf in overlays:
            ax.plot(xs, pdf(xs), lw=1.5, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def save_scaling_plot(horizons, u_t, v_t, path, title: str | None = None) -> None:
    logs = np.log(np.asarray(horizons, dtype=float))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(logs, u_t, "o-", ms=3)
    ax1.set_xlabel("ln T")
    ax1.set_ylabel("U_T")
    ax2.plot(logs, np.asarray(v_t) ** 2, "o-", ms=3, color="tab:orange")
    ax2.set_xlabel("ln T")
    ax2.set_ylabel("V_T^2")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
