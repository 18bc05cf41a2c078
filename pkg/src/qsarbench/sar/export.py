"""Induced-rule table export and the compact range summary."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .rules import SarRule

RULE_TABLE_COLUMNS = (
    "endpoint",
    "rule_id",
    "predicate",
    "direction",
    "mean_delta_active_rate",
    "mean_support",
    "n_folds",
    "per_fold_delta",
    "per_fold_support",
)


def export_rule_table(per_endpoint: Mapping[str, Sequence[Sequence[SarRule]]]) -> list[dict]:
    """One row per (endpoint, rule id), aggregated over the folds that induced it.

    Args:
        per_endpoint: endpoint name -> list over folds of that fold's induced rules.

    Rows are sorted by endpoint, then |mean delta| descending, then rule id.
    """
    rows = []
    for endpoint in sorted(per_endpoint):
        acc: dict[str, dict] = {}
        for fold_idx, rules in enumerate(per_endpoint[endpoint]):
            for r in rules:
                if r.origin != "induced" or r.delta is None:
                    continue
                fold = r.fold if r.fold is not None else fold_idx
                entry = acc.setdefault(r.rule_id, {"source": r.source, "delta": {}, "support": {}})
                entry["delta"][fold] = r.delta
                entry["support"][fold] = r.support
        for rid, e in acc.items():
            folds = sorted(e["delta"])
            md = float(np.mean([e["delta"][f] for f in folds]))
            ms = float(np.mean([e["support"][f] for f in folds]))
            rows.append(
                {
                    "endpoint": endpoint,
                    "rule_id": rid,
                    "predicate": e["source"],
                    "direction": "activating" if md > 0 else "deactivating",
                    "mean_delta_active_rate": md,
                    "mean_support": ms,
                    "n_folds": len(folds),
                    "per_fold_delta": ";".join(f"{f}:{e['delta'][f]:.6f}" for f in folds),
                    "per_fold_support": ";".join(f"{f}:{e['support'][f]:.6f}" for f in folds),
                }
            )
    rows.sort(key=lambda r: (r["endpoint"], -abs(r["mean_delta_active_rate"]), r["rule_id"]))
    return rows


def rule_table_text(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=RULE_TABLE_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def write_rule_table(rows: Sequence[dict], path: Path) -> None:
    Path(path).write_text(rule_table_text(rows))


def _per_fold(text: str) -> list[float]:
    return [float(part.split(":")[1]) for part in text.split(";") if part]


def summarize_row(row: Mapping) -> str:
    """Compact range form, e.g. ``antimalaria; quinoline; +0.25 to +0.37; support 0.21–0.30``."""
    deltas = _per_fold(row["per_fold_delta"])
    supports = _per_fold(row["per_fold_support"])
    return (
        f"{row['endpoint']}; {row['rule_id']}; {min(deltas):+.2f} to {max(deltas):+.2f}; "
        f"support {min(supports):.2f}–{max(supports):.2f}"
    )
