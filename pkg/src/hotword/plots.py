"""Figure rendering for bench reports.

Writes static image files next to the CSV so a sweep run leaves both the
numbers and a quick visual. Uses the Agg backend; safe on headless boxes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import BenchReport


def render_report(report: BenchReport, path: str | Path) -> Path:
    """Plot FRR and FAR/h against the cutoff grid and save to path."""
    path = Path(path)
    cutoffs = [row.cutoff for row in report.rows]
    frr = [row.frr for row in report.rows]
    far = [row.far_per_hour for row in report.rows]

    fig, ax_frr = plt.subplots(figsize=(6.0, 3.8))
    ax_frr.plot(cutoffs, frr, "o-", color="tab:blue", label="FRR")
    ax_frr.set_xlabel("score cutoff")
    ax_frr.set_ylabel("false rejection rate", color="tab:blue")
    ax_frr.set_ylim(-0.02, 1.02)
    ax_frr.tick_params(axis="y", labelcolor="tab:blue")

    ax_far = ax_frr.twinx()
    ax_far.plot(cutoffs, far, "s--", color="tab:red", label="FAR/h")
    ax_far.set_ylabel("false accepts per hour", color="tab:red")
    ax_far.tick_params(axis="y", labelcolor="tab:red")

    ax_frr.spines["top"].set_visible(False)
    ax_far.spines["top"].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
