"""Ranking, operating-point and regression metrics."""

from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.stats import rankdata

from ..errors import UndefinedMetricError

METRIC_NAMES = ("pr_auc", "roc_auc", "p0", "r0", "p1", "r1", "mae", "pearson")
FAMILIES = ("ML", "GNN", "Sequence", "LLM-SAR")
MINIMIZED = frozenset({"mae"})


@dataclass(frozen=True)
class MetricRecord:
    task: str
    model: str
    family: str
    fold: str
    metric: str
    value: float
    flags: str = ""


def _binary(scores, labels):
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and labels must be 1-D and equal length")
    return s, (y == 1)


def roc_auc(scores, labels) -> float:
    """Mann-Whitney statistic with midranks for ties.

    Raises:
        UndefinedMetricError: unless both classes are present.
    """
    s, pos = _binary(scores, labels)
    n1 = int(pos.sum())
    n0 = len(s) - n1
    if n1 == 0 or n0 == 0:
        raise UndefinedMetricError("roc_auc needs both classes")
    ranks = rankdata(s)
    return float((ranks[pos].sum() - n1 * (n1 + 1) / 2) / (n1 * n0))


def pr_auc(scores, labels) -> float:
    """Average precision with ties resolved by their expectation.

    Within a block of g tied items holding m positives, every ordering of the
    block is equally likely; the contribution is the mean of
    precision-at-rank over those orderings, which has a closed form.

    Raises:
        UndefinedMetricError: if there are no positives.
    """
    s, pos = _binary(scores, labels)
    total_pos = int(pos.sum())
    if total_pos == 0:
        raise UndefinedMetricError("pr_auc needs at least one positive")
    order = np.argsort(-s, kind="stable")
    s_sorted, p_sorted = s[order], pos[order]
    # tie-group boundaries
    starts = np.flatnonzero(np.r_[True, s_sorted[1:] != s_sorted[:-1]])
    ends = np.r_[starts[1:], len(s)]
    ap = 0.0
    P = 0  # positives ranked above the block
    N = 0  # items ranked above the block
    for a, b in zip(starts, ends):
        g = b - a
        m = int(p_sorted[a:b].sum())
        if m:
            k = np.arange(1, g + 1)
            # expected positives above slot k, given slot k holds a positive
            above = P + 1 + (k - 1) * (m - 1) / (g - 1) if g > 1 else np.array([P + 1.0])
            ap += float(np.sum((m / g) * above / (N + k)))
        P += m
        N += g
    return ap / total_pos


@dataclass(frozen=True)
class ClassPR:
    p0: float
    r0: float
    p1: float
    r1: float
    undefined: tuple[str, ...] = ()


def class_precision_recall(scores, labels, threshold: float = 0.5) -> ClassPR:
    """Per-class precision and recall of ``score >= threshold``; 0/0 is reported as 0 and flagged."""
    s, pos = _binary(scores, labels)
    pred = s >= threshold
    tp = int(np.sum(pred & pos))
    fp = int(np.sum(pred & ~pos))
    fn = int(np.sum(~pred & pos))
    tn = int(np.sum(~pred & ~pos))
    undefined = []

    def ratio(num, den, name):
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    p1 = ratio(tp, tp + fp, "p1")
    r1 = ratio(tp, tp + fn, "r1")
    p0 = ratio(tn, tn + fn, "p0")
    r0 = ratio(tn, tn + fp, "r0")
    return ClassPR(p0, r0, p1, r1, tuple(undefined))


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    pearson: float | None


def mae(pred, target) -> float:
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape or p.size == 0:
        raise ValueError("pred and target must be non-empty and equal length")
    return float(np.mean(np.abs(p - t)))


def pearson(pred, target) -> float:
    """Sample correlation.

    Raises:
        UndefinedMetricError: if either side has zero variance.
    """
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape or p.size < 2:
        raise UndefinedMetricError("pearson needs at least two paired values")
    dp, dt = p - p.mean(), t - t.mean()
    sp, st = np.sqrt(dp @ dp), np.sqrt(dt @ dt)
    if sp == 0 or st == 0:
        raise UndefinedMetricError("pearson is undefined for zero variance")
    return float(np.clip((dp @ dt) / (sp * st), -1.0, 1.0))


def regression_metrics(pred, target) -> RegressionMetrics:
    """MAE plus Pearson; Pearson is None when undefined."""
    m = mae(pred, target)
    try:
        r = pearson(pred, target)
    except UndefinedMetricError:
        r = None
    return RegressionMetrics(m, r)


def prevalence(labels) -> float:
    y = np.asarray(labels)
    if y.size == 0:
        raise UndefinedMetricError("prevalence of an empty label set")
    return float(np.mean(y == 1))


def prevalence_enrichment(pr_auc_value: float, labels) -> float:
    """PR-AUC divided by the positive rate."""
    pi = prevalence(labels)
    if pi == 0:
        raise UndefinedMetricError("enrichment needs at least one positive")
    return pr_auc_value / pi


def classification_records(task, model, family, fold, scores, labels, flags: str = "", threshold: float = 0.5):
    """All classification metric records for one held-out fold.

    Undefined ranking metrics are kept as NaN with an ``undefined`` flag so the
    fold can be excluded (and counted) during aggregation.
    """
    out = []
    for name, fn in (("pr_auc", pr_auc), ("roc_auc", roc_auc)):
        try:
            out.append(MetricRecord(task, model, family, str(fold), name, fn(scores, labels), flags))
        except UndefinedMetricError:
            out.append(MetricRecord(task, model, family, str(fold), name, float("nan"), _join(flags, "undefined")))
    cpr = class_precision_recall(scores, labels, threshold)
    for name in ("p0", "r0", "p1", "r1"):
        f = _join(flags, "zero_division") if name in cpr.undefined else flags
        out.append(MetricRecord(task, model, family, str(fold), name, getattr(cpr, name), f))
    return out


def regression_records(task, model, family, fold, pred, target, flags: str = ""):
    rm = regression_metrics(pred, target)
    out = [MetricRecord(task, model, family, str(fold), "mae", rm.mae, flags)]
    if rm.pearson is None:
        out.append(MetricRecord(task, model, family, str(fold), "pearson", float("nan"), _join(flags, "undefined")))
    else:
        out.append(MetricRecord(task, model, family, str(fold), "pearson", rm.pearson, flags))
    return out


def _join(flags: str, extra: str) -> str:
    return ";".join(x for x in (flags, extra) if x)


RECORD_COLUMNS = tuple(f.name for f in fields(MetricRecord))


def record_sort_key(r: MetricRecord):
    return (r.task, r.model, r.fold, METRIC_NAMES.index(r.metric) if r.metric in METRIC_NAMES else 99, r.metric)


def format_value(v: float) -> str:
    """Shortest round-trip text for a float, ``nan`` for undefined values."""
    return "nan" if v != v else repr(float(v))


def write_records(path, records: Iterable[MetricRecord]) -> None:
    """Write records as long-format CSV in a fixed row order."""
    rows = sorted(records, key=record_sort_key)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in rows:
            t = astuple(r)
            w.writerow([*t[:5], format_value(r.value), r.flags])


def read_records(path) -> list[MetricRecord]:
    """Read a long-format metric CSV (harness output or an external fixture).

    Raises:
        SchemaError: if a required column is missing or a value is not numeric.
    """
    from ..errors import SchemaError

    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RECORD_COLUMNS if c != "flags" and c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path.name}: missing columns {missing}")
        out = []
        for i, row in enumerate(reader, start=2):
            try:
                value = float(row["value"])
            except ValueError:
                raise SchemaError(f"{path.name}:{i}: value {row['value']!r} is not numeric") from None
            out.append(
                MetricRecord(
                    row["task"], row["model"], row["family"], row["fold"], row["metric"], value, row.get("flags") or ""
                )
            )
    return out


__all__ = [
    "FAMILIES",
    "METRIC_NAMES",
    "MINIMIZED",
    "RECORD_COLUMNS",
    "ClassPR",
    "MetricRecord",
    "RegressionMetrics",
    "class_precision_recall",
    "classification_records",
    "mae",
    "pearson",
    "pr_auc",
    "prevalence",
    "prevalence_enrichment",
    "read_records",
    "record_sort_key",
    "regression_metrics",
    "regression_records",
    "roc_auc",
    "write_records",
]
