"""Fold-mean aggregation and per-column ranking."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from ..errors import AllFoldsUndefinedError
from ..metrics import FAMILIES, MINIMIZED, MetricRecord


class RankTieWarning(UserWarning):
    """Two or more models share the best value in a column."""


@dataclass(frozen=True)
class AggregatedCell:
    task: str
    model: str
    family: str
    metric: str
    value: float
    n_folds: int
    excluded: int
    rank: int | None = None
    winner: bool = False

    @property
    def missing(self) -> bool:
        return self.n_folds == 0


@dataclass(frozen=True)
class TieNote:
    task: str
    metric: str
    value: float
    models: tuple[str, ...]
    winner: str

    def message(self) -> str:
        return (
            f"tie at {self.value!r} for {self.task}/{self.metric} between {', '.join(self.models)}; "
            f"winner by family precedence then model id: {self.winner}"
        )


def mean_of_defined(values: Sequence[float]) -> tuple[float, int, int]:
    """Mean over non-NaN values.

    Returns:
        (mean, used, excluded).

    Raises:
        AllFoldsUndefinedError: if no value is defined.
    """
    defined = [float(v) for v in values if not math.isnan(v)]
    if not defined:
        raise AllFoldsUndefinedError(f"all {len(values)} fold values are undefined")
    # plain left-to-right sum keeps the result independent of numpy's pairwise blocking
    total = 0.0
    for v in defined:
        total += v
    return total / len(defined), len(defined), len(values) - len(defined)


def fold_mean(records: Iterable[MetricRecord]) -> list[AggregatedCell]:
    """One cell per (task, model, metric), averaging the defined folds.

    Cells whose folds are all undefined come back with ``n_folds == 0`` and a NaN
    value so that tables can show them as missing. Order follows first appearance.
    """
    groups: dict[tuple[str, str, str], list[MetricRecord]] = {}
    for r in records:
        groups.setdefault((r.task, r.model, r.metric), []).append(r)
    cells = []
    for (task, model, metric), recs in groups.items():
        family = recs[0].family
        try:
            value, used, excluded = mean_of_defined([r.value for r in recs])
        except AllFoldsUndefinedError:
            value, used, excluded = float("nan"), 0, len(recs)
        cells.append(AggregatedCell(task, model, family, metric, value, used, excluded))
    return cells


def family_precedence(family: str) -> int:
    return FAMILIES.index(family) if family in FAMILIES else len(FAMILIES)


def dense_ranks(values: Sequence[float], minimize: bool) -> list[int]:
    """Dense ranks, 1 for the best value; equal values share a rank."""
    distinct = sorted(set(values), reverse=not minimize)
    pos = {v: i + 1 for i, v in enumerate(distinct)}
    return [pos[v] for v in values]


def rank_annotate(cells: Iterable[AggregatedCell], emit_warnings: bool = True):
    """Rank every (task, metric) column and pick one winner per column.

    Ranking uses full-precision values. MAE is minimized, everything else is
    maximized. Missing cells get no rank. Exact ties for first place are
    resolved by family precedence and then model id, and reported.

    Returns:
        (ranked cells in input order, list of TieNote).
    """
    cells = list(cells)
    columns: dict[tuple[str, str], list[int]] = {}
    for i, c in enumerate(cells):
        if not c.missing:
            columns.setdefault((c.task, c.metric), []).append(i)
    out = list(cells)
    ties = []
    for (task, metric), idx in columns.items():
        ranks = dense_ranks([cells[i].value for i in idx], metric in MINIMIZED)
        for i, r in zip(idx, ranks):
            out[i] = replace(cells[i], rank=r)
        best = [i for i, r in zip(idx, ranks) if r == 1]
        best.sort(key=lambda i: (family_precedence(cells[i].family), cells[i].model))
        out[best[0]] = replace(out[best[0]], winner=True)
        if len(best) > 1:
            note = TieNote(task, metric, cells[best[0]].value, tuple(cells[i].model for i in best), cells[best[0]].model)
            ties.append(note)
            if emit_warnings:
                warnings.warn(note.message(), RankTieWarning, stacklevel=2)
    return out, ties
