"""Figure rendering for the report directory (file output only)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..metrics import FAMILIES  # noqa: E402
from .winners import METRIC_LABELS, WinnerTable  # noqa: E402

FAMILY_COLORS = {"ML": "#4c72b0", "GNN": "#55a868", "Sequence": "#c44e52", "LLM-SAR": "#8172b2"}


def plot_winner_counts(table: WinnerTable, path: Path) -> Path | None:
    """Stacked horizontal bars of columns won per family, one bar per table row.

    Returns the written path, or None when the table is empty.
    """
    if not table.rows:
        return None
    labels = [f"{r.group} | {METRIC_LABELS.get(r.metric, r.metric)}" for r in table.rows]
    fig, ax = plt.subplots(figsize=(8, 0.45 * len(labels) + 1.2))
    left = [0] * len(labels)
    for k, fam in enumerate(FAMILIES):
        counts = [r.wins[k] for r in table.rows]
        ax.barh(labels, counts, left=left, color=FAMILY_COLORS[fam], label=fam)
        left = [a + b for a, b in zip(left, counts)]
    ax.invert_yaxis()
    ax.set_xlabel("columns won")
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # no timestamp metadata so reruns write identical bytes
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path
