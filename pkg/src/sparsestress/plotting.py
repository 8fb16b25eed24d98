"""Matplotlib figures for metric reports (error chart plus neighborhood curves)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricReport  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "sparsestress",
}


def error_chart(ax, report: MetricReport) -> None:
    """Median line, 25-75 band and min/max envelope of the distance error."""
    bins = report.error_histogram
    if not bins:
        return
    xs = [(b.lo + b.hi) / 2 for b in bins]
    ax.axhline(0.0, color="black", lw=0.8)
    ax.fill_between(xs, [b.p25 for b in bins], [b.p75 for b in bins], color="0.6", lw=0)
    ax.plot(xs, [b.median for b in bins], color="tab:red", lw=1.2, label="median")
    ax.plot(xs, [b.min for b in bins], "k--", lw=0.7, label="min/max")
    ax.plot(xs, [b.max for b in bins], "k--", lw=0.7)
    ax.set_xlabel("graph-theoretic distance")
    ax.set_ylabel("euclidean - graph distance")
    ax.legend(frameon=False)


def curve_chart(ax, report: MetricReport) -> None:
    for name, curve in (("Gabriel Jaccard", report.gabriel_jaccard), ("hull error", report.hull_error)):
        pts = [(k, v) for k, v in enumerate(curve, start=1) if v is not None]
        if pts:
            ks, vs = zip(*pts)
            ax.plot(ks, vs, marker="o", ms=3, label=name)
    ax.set_xlabel("k (hops)")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(frameon=False)


def save_report_figure(report: MetricReport, path, title: str | None = None) -> None:
    with plt.rc_context(RC):
        fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.2))
        error_chart(left, report)
        curve_chart(right, report)
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150, metadata={"Date": None} if str(path).endswith(".svg") else None)
        plt.close(fig)
