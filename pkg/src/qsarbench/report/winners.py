"""Family winner counts per task group and metric."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from ..errors import UnmappedModelError
from ..metrics import FAMILIES
from .aggregate import AggregatedCell

PRIMARY_METRICS = ("pr_auc", "roc_auc", "mae", "pearson")
METRIC_LABELS = {"pr_auc": "PR-AUC", "roc_auc": "ROC-AUC", "mae": "MAE", "pearson": "Pearson"}

# Task grouping used by the published benchmark; harness runs supply their own.
PAPER_TASK_GROUPS = {
    **{t: "ADMET classification" for t in ("AMES", "BBB", "CYP3A4", "DILI", "hERG")},
    **{t: "ADMET regression" for t in ("Caco2", "Lipophilicity", "Solubility")},
    **{
        t: "Tox21 classification"
        for t in (
            "NR-AR", "NR-AR-LBD", "NR-AhR", "NR-Aromatase", "NR-ER", "NR-ER-LBD",
            "NR-PPAR-gamma", "SR-ARE", "SR-ATAD5", "SR-HSE", "SR-MMP", "SR-p53",
        )
    },
    **{t: "Anti-infective classification" for t in ("anti-TB", "antimalaria")},
}
GROUP_ORDER = (
    "ADMET classification",
    "ADMET regression",
    "Tox21 classification",
    "Anti-infective classification",
)
UNGROUPED = "Other"


@dataclass(frozen=True)
class WinnerRow:
    group: str
    metric: str
    n: int
    wins: tuple[int, ...]  # aligned with FAMILIES
    leading: str
    columns: tuple[tuple[str, str], ...] = ()  # (task, winning model)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(FAMILIES, self.wins))


@dataclass(frozen=True)
class WinnerTable:
    rows: tuple[WinnerRow, ...]

    def row(self, group: str, metric: str) -> WinnerRow:
        for r in self.rows:
            if r.group == group and r.metric == metric:
                return r
        raise KeyError((group, metric))


def leading_label(wins: tuple[int, ...]) -> str:
    """Family (or slash-joined families) with the most wins; empty when nothing was won."""
    top = max(wins) if wins else 0
    if top == 0:
        return ""
    return "/".join(f for f, w in zip(FAMILIES, wins) if w == top)


def _group_key(group: str):
    return (GROUP_ORDER.index(group), "") if group in GROUP_ORDER else (len(GROUP_ORDER), group)


def winner_counts(
    cells: Iterable[AggregatedCell],
    family_map: Mapping[str, str] | None = None,
    task_groups: Mapping[str, str] | None = None,
    metrics: tuple[str, ...] = PRIMARY_METRICS,
) -> WinnerTable:
    """Count columns won per family for every (task group, metric).

    Args:
        cells: ranked cells (see ``rank_annotate``); exactly one winner per column.
        family_map: model id to family. Defaults to the family carried by each cell.
        task_groups: task to group name; unknown tasks fall into ``Other``.
        metrics: which metrics count as columns.

    Raises:
        UnmappedModelError: a model has no family, or its family is not a known one.
    """
    task_groups = PAPER_TASK_GROUPS if task_groups is None else task_groups
    won: dict[tuple[str, str], list[tuple[str, str, str]]] = {}
    for c in cells:
        fam = c.family if family_map is None else family_map.get(c.model)
        if fam is None:
            raise UnmappedModelError(f"model {c.model!r} has no family mapping")
        if fam not in FAMILIES:
            raise UnmappedModelError(f"model {c.model!r} maps to unknown family {fam!r}")
        if c.metric not in metrics or not c.winner:
            continue
        group = task_groups.get(c.task, UNGROUPED)
        won.setdefault((group, c.metric), []).append((c.task, c.model, fam))
    rows = []
    for group, metric in sorted(won, key=lambda k: (_group_key(k[0]), metrics.index(k[1]))):
        entries = won[(group, metric)]
        wins = tuple(sum(1 for _, _, f in entries if f == fam) for fam in FAMILIES)
        rows.append(
            WinnerRow(group, metric, len(entries), wins, leading_label(wins), tuple((t, m) for t, m, _ in entries))
        )
    return WinnerTable(tuple(rows))
