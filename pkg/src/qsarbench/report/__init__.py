"""Fold-mean aggregation, ranking, family winner counts and table emission."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..metrics import MetricRecord, read_records
from .aggregate import (
    AggregatedCell,
    RankTieWarning,
    TieNote,
    dense_ranks,
    fold_mean,
    mean_of_defined,
    rank_annotate,
)
from .tables import FORMATS, build_blocks, emit_tables, read_table_csv
from .winners import (
    GROUP_ORDER,
    METRIC_LABELS,
    PAPER_TASK_GROUPS,
    PRIMARY_METRICS,
    WinnerRow,
    WinnerTable,
    leading_label,
    winner_counts,
)

PAPER_FIXTURE = Path(__file__).resolve().parent.parent / "data" / "paper_tables.csv"


@dataclass
class Report:
    cells: list[AggregatedCell]
    ties: list[TieNote]
    winners: WinnerTable
    written: list[Path]


def build_report(
    records: Sequence[MetricRecord],
    out_dir: Path | None = None,
    fmt: str = "csv",
    groups: Mapping[str, str] | None = None,
    family_map: Mapping[str, str] | None = None,
    sar_rows=None,
    header: Sequence[str] | None = None,
    figures: bool = True,
) -> Report:
    """Aggregate, rank and count winners; write tables and figures when ``out_dir`` is given."""
    cells, ties = rank_annotate(fold_mean(records), emit_warnings=False)
    winners = winner_counts(cells, family_map, groups)
    written: list[Path] = []
    if out_dir is not None:
        kw = {} if header is None else {"header": header}
        written = emit_tables(cells, winners, out_dir, fmt, groups, ties, sar_rows, **kw)
        if figures:
            from .plotting import plot_winner_counts

            fig = plot_winner_counts(winners, Path(out_dir) / "figures" / "family_winners.png")
            if fig is not None:
                written.append(fig)
    return Report(cells, ties, winners, written)


def paper_report(path: Path = PAPER_FIXTURE, out_dir: Path | None = None, fmt: str = "csv", figures: bool = True) -> Report:
    """Report built from the bundled transcription of the published matrices."""
    return build_report(read_records(path), out_dir, fmt, PAPER_TASK_GROUPS, figures=figures)


__all__ = [
    "FORMATS",
    "GROUP_ORDER",
    "METRIC_LABELS",
    "PAPER_FIXTURE",
    "PAPER_TASK_GROUPS",
    "PRIMARY_METRICS",
    "AggregatedCell",
    "RankTieWarning",
    "Report",
    "TieNote",
    "WinnerRow",
    "WinnerTable",
    "build_blocks",
    "build_report",
    "dense_ranks",
    "emit_tables",
    "fold_mean",
    "leading_label",
    "mean_of_defined",
    "paper_report",
    "rank_annotate",
    "read_table_csv",
    "winner_counts",
]
