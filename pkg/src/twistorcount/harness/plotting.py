"""Histogram figures for sampled counts, rendered off-screen."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def count_histograms(rows: list[dict], path: str | Path, title: str = "") -> Path:
    """One row of Q1/Q2 histograms per rank class present in ``rows``."""
    by_class: dict[int, list[dict]] = defaultdict(list)
    for row in rows:
        by_class[row["rank_zeta"]].append(row)
    classes = sorted(by_class) or [0]
    fig, axes = plt.subplots(len(classes), 2, figsize=(8, 2.8 * len(classes)), squeeze=False)
    for (ax1, ax2), rc in zip(axes, classes):
        group = by_class.get(rc, [])
        for ax, key in ((ax1, "q1"), (ax2, "q2")):
            values = [r[key] for r in group]
            if values:
                lo, hi = min(values), max(values)
                ax.hist(values, bins=range(lo, hi + 2), align="left", rwidth=0.8)
            ax.set_title(f"rank(zeta) = {rc}: {key.upper()}")
            ax.set_xlabel(key.upper())
            ax.set_ylabel("samples")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path
