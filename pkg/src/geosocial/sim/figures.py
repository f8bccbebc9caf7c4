"""Accuracy-report figures rendered next to the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .runner import AccuracyReport

MAX_SCATTER_TRIALS = 200


def render_figures(report: AccuracyReport, report_path) -> list[str]:
    """Write the error CDF and position scatter; returns the file paths."""
    stem = Path(report_path).with_suffix("")
    written = []

    errors = np.asarray([t.error_m for t in report.trials if t.error_m is not None])
    fig, ax = plt.subplots(figsize=(6, 4))
    if errors.size:
        ordered = np.sort(errors)
        fraction = np.arange(1, ordered.size + 1) / ordered.size
        ax.step(ordered, fraction, where="post")
        ax.set_xscale("log")
    ax.set_xlabel("position error [m]")
    ax.set_ylabel("fraction of trials")
    ax.set_title("Position error CDF")
    ax.grid(True, which="both", alpha=0.3)
    cdf_path = f"{stem}_error_cdf.png"
    fig.savefig(cdf_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(cdf_path)

    fig, ax = plt.subplots(figsize=(5, 5))
    shown = [t for t in report.trials if t.estimate_xy is not None][:MAX_SCATTER_TRIALS]
    if shown:
        true_xy = np.asarray([t.true_xy for t in shown])
        est_xy = np.asarray([t.estimate_xy for t in shown])
        ax.scatter(true_xy[:, 0], true_xy[:, 1], s=18, marker="o", label="true",
                   facecolors="none", edgecolors="tab:blue")
        ax.scatter(est_xy[:, 0], est_xy[:, 1], s=10, marker="x", color="tab:red",
                   label="estimated")
        for t, e in zip(true_xy, est_xy):
            ax.plot([t[0], e[0]], [t[1], e[1]], color="gray", lw=0.5, alpha=0.5)
        ax.legend(loc="best")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title("True vs estimated positions")
    ax.set_aspect("equal", adjustable="datalim")
    scatter_path = f"{stem}_positions.png"
    fig.savefig(scatter_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(scatter_path)

    return written
