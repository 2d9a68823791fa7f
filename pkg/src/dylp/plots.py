"""Figure rendering for evaluation reports.

Renders the same data that goes into the CSV outputs: ROC / PR curve
overlays per population and the two distance panels (fraction of formed
edges per distance, and empirical edge probability per distance). All
figures are written to files; no interactive backend is required.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .geodesics import DistanceHistogram
from .metrics import ThresholdCurve

_AXIS_LABELS = {
    "roc": ("false positive rate", "true positive rate"),
    "pr": ("recall", "precision"),
}


def save_curve_overlay(curves: list[tuple[str, ThresholdCurve]], kind: str,
                       path, title: str | None = None) -> None:
    """Overlay one ROC or PR curve per predictor and save to ``path``."""
    xlabel, ylabel = _AXIS_LABELS[kind]
    fig, ax = plt.subplots(figsize=(4.5, 4.0))
    for label, curve in curves:
        ax.plot(curve.x, curve.y, label=f"{label} (area={curve.area:.4g})", lw=1.5)
    if kind == "roc":
        ax.plot([0, 1], [0, 1], ls="--", c="gray", lw=0.8)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_distance_figure(hist: DistanceHistogram, path, title: str | None = None) -> None:
    """Two panels: edge-formation fraction and probability per distance."""
    labels = [b.label for b in hist.buckets]
    fractions = [b.fraction_of_edges for b in hist.buckets]
    probs = [b.edge_probability for b in hist.buckets]
    xs = range(len(labels))

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    ax1.bar(xs, fractions, color="steelblue")
    ax1.set_xticks(list(xs), labels)
    ax1.set_xlabel("geodesic distance")
    ax1.set_ylabel("fraction of formed edges")

    px = [x for x, p in zip(xs, probs) if p is not None and p > 0]
    py = [p for p in probs if p is not None and p > 0]
    ax2.plot(px, py, "o-", color="firebrick")
    ax2.set_yscale("log")
    ax2.set_xticks(list(xs), labels)
    ax2.set_xlabel("geodesic distance")
    ax2.set_ylabel("edge probability")

    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
