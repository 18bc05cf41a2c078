"""CSV ingestion: parse, canonicalize, binarize, deduplicate."""

from __future__ import annotations

import csv
import logging
from dataclasses import replace
from pathlib import Path

from ..datasplit import TaskDataset, deduplicate
from ..errors import SchemaError
from .config import Binarization, TaskSpec

log = logging.getLogger(__name__)


def _labels(rows: list[dict], spec: TaskSpec, path: Path) -> tuple[list[tuple[str, float]], int]:
    out, invalid = [], 0
    b: Binarization | None = spec.binarize
    for i, row in enumerate(rows, start=2):
        smi = row[spec.smiles_column]
        try:
            if b is not None:
                unit = row[b.unit_column].strip() if b.unit_column else None
                label = float(b.active(b.convert(float(row[b.column]), unit)))
            else:
                label = float(row[spec.label_column])
                if spec.kind == "classification" and label not in (0.0, 1.0):
                    raise ValueError(f"label {label} is not 0 or 1")
        except (TypeError, ValueError) as exc:
            log.warning("%s:%d: dropping row (%s)", path.name, i, exc)
            invalid += 1
            continue
        out.append((smi, label))
    return out, invalid


def ingest_dataset(spec: TaskSpec) -> TaskDataset:
    """Load one task CSV into a deduplicated TaskDataset.

    Rows with an unusable label or value are dropped and counted as
    ``value_dropped``; the counts always reconcile to the raw row count.

    Raises:
        SchemaError: if the file is unreadable or a declared column is missing.
        EmptyDatasetError: if nothing survives.
    """
    path = Path(spec.file)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"task {spec.name}: cannot read {path}: {exc}") from None
    need = [spec.smiles_column]
    if spec.binarize is not None:
        need.append(spec.binarize.column)
        if spec.binarize.unit_column:
            need.append(spec.binarize.unit_column)
    else:
        need.append(spec.label_column)
    missing = [c for c in need if c not in header]
    if missing:
        raise SchemaError(f"task {spec.name}: {path.name} lacks column(s) {missing}; header is {header}")
    pairs, invalid = _labels(rows, spec, path)
    ds = deduplicate(pairs, spec.kind, spec.name)
    counts = {**ds.counts, "raw": len(rows), "value_dropped": invalid}
    return replace(ds, counts=counts)


def ingest_summary(ds: TaskDataset) -> dict:
    """Counts plus n and positive rate, as echoed in the run manifest."""
    out = {"task": ds.name, "kind": ds.kind, "n": len(ds), **ds.counts}
    if ds.positive_rate is not None:
        out["positive_rate"] = round(ds.positive_rate, 6)
        out["positives"] = int(sum(ds.labels))
    return out
