"""Figure rendering for report-producing commands.

Every renderer writes a PNG next to the delimited report file.  The Agg
backend is forced so rendering works headless; PNG metadata is stripped
so identical inputs produce identical bytes.
"""

from __future__ import annotations

from typing import Mapping, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "render_quality_figure",
    "render_confusion_figure",
    "render_eval_figure",
]

_SAVE_KWARGS = {"format": "png", "dpi": 100, "metadata": {"Software": None}}


def _save(fig, path):
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_quality_figure(report: Mapping, path) -> None:
    """Bar chart of the quality-control rates in a report dict."""
    names = ["accuracy_on_gold", "wawa", "qualification_pass_rate", "survival_rate"]
    labels = ["accuracy\non gold", "WAWA", "pass rate", "survival"]
    values = [report.get(name) for name in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = range(len(names))
    heights = [v if v is not None else 0.0 for v in values]
    bars = ax.bar(xs, heights, color="#4878a8")
    for bar, value in zip(bars, values):
        text = "n/a" if value is None else f"{value:.3f}"
        ax.text(bar.get_x() + bar.get_width() / 2, bar.get_height() + 0.02,
                text, ha="center", va="bottom", fontsize=9)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels)
    ax.set_ylim(0, 1.15)
    ax.set_ylabel("rate")
    ax.set_title(f"annotation quality ({report.get('n_judgements', 0)} judgements)")
    fig.tight_layout()
    _save(fig, path)


def render_confusion_figure(
    row_labels, col_labels, counts, path, title: str = "label confusion"
) -> None:
    """Heatmap of a confusion matrix; cells annotated with counts."""
    fig, ax = plt.subplots(figsize=(1.2 * len(col_labels) + 2, 1.0 * len(row_labels) + 2))
    image = ax.imshow(counts, cmap="Blues")
    ax.set_xticks(range(len(col_labels)))
    ax.set_xticklabels([str(lab) for lab in col_labels], rotation=45, ha="right")
    ax.set_yticks(range(len(row_labels)))
    ax.set_yticklabels([str(lab) for lab in row_labels])
    peak = max((max(row) for row in counts), default=0)
    for i, row in enumerate(counts):
        for j, count in enumerate(row):
            color = "white" if peak and count > peak / 2 else "black"
            ax.text(j, i, str(count), ha="center", va="center", color=color)
    fig.colorbar(image, ax=ax, shrink=0.8)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def render_eval_figure(report: Mapping, path, title: Optional[str] = None) -> None:
    """Grouped per-label precision/recall/F1 bars for an evaluation report."""
    per_label = report.get("per_label", {})
    labels = list(per_label)
    metrics = ("precision", "recall", "f1")
    colors = ("#4878a8", "#e0a030", "#5a9a68")
    width = 0.25
    fig, ax = plt.subplots(figsize=(1.6 * max(len(labels), 1) + 2, 4))
    for k, (metric, color) in enumerate(zip(metrics, colors)):
        xs = [i + (k - 1) * width for i in range(len(labels))]
        heights = [per_label[lab].get(metric) or 0.0 for lab in labels]
        ax.bar(xs, heights, width=width, color=color, label=metric)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_ylim(0, 1.1)
    ax.legend(loc="upper right", fontsize=8)
    if title is None:
        overall = report.get("overall_f1")
        title = "per-label scores" if overall is None else f"per-label scores (overall F1 {overall:.3f})"
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
