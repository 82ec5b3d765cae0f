"""Figures for evaluation reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .evaluation import METHOD_LABELS, EvaluationReport  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "legend.fontsize": 8,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def figsize(width: float = 7.0, ratio: float | None = None) -> tuple[float, float]:
    if ratio is None:
        ratio = (5**0.5 - 1) / 2
    return width, width * ratio


def plot_report(report: EvaluationReport, path: str | Path, title: str | None = None) -> Path:
    """Precision@K curves (class averages) next to a per-class heatmap at the largest K.

    The output format follows the file suffix (png, pdf, svg).
    """
    path = Path(path)
    k_max = max(report.ks)
    with plt.rc_context(STYLE):
        fig, (ax_curve, ax_heat) = plt.subplots(
            1, 2, figsize=figsize(10.0, 0.42), gridspec_kw={"width_ratios": [1.2, 1]}
        )
        for method in report.methods:
            values = [report.method_average(method, k) for k in report.ks]
            ax_curve.plot(report.ks, values, marker="o", label=METHOD_LABELS[method])
        avg = [report.average_match(k) for k in report.ks]
        ax_curve.plot(report.ks, avg, marker="s", color="black", linestyle="--",
                      label="Average Match")
        ax_curve.set_xticks(report.ks)
        ax_curve.set_xlabel("K")
        ax_curve.set_ylabel("Precision@K")
        ax_curve.set_ylim(0, 100)
        ax_curve.legend(frameon=False)

        grid = [[report.score(c, m, k_max) for m in report.methods] for c in report.classes]
        im = ax_heat.imshow(grid, vmin=0, vmax=100, cmap="viridis", aspect="auto")
        ax_heat.set_xticks(range(len(report.methods)))
        ax_heat.set_xticklabels([METHOD_LABELS[m] for m in report.methods], rotation=30,
                                ha="right")
        ax_heat.set_yticks(range(len(report.classes)))
        ax_heat.set_yticklabels(report.classes)
        ax_heat.set_title(f"Per class, K={k_max}")
        for i, row in enumerate(grid):
            for j, value in enumerate(row):
                ax_heat.text(j, i, f"{value:.0f}", ha="center", va="center",
                             color="white" if value < 60 else "black", fontsize=8)
        fig.colorbar(im, ax=ax_heat, fraction=0.046, pad=0.04)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        metadata = {"Software": None} if path.suffix.lower() == ".png" else None
        fig.savefig(path, dpi=150, metadata=metadata)
        plt.close(fig)
    return path
