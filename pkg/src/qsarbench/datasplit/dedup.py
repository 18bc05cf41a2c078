"""Per-task dataset records and canonical-SMILES deduplication."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable

from ..chem import canonicalize
from ..errors import EmptyDatasetError, ParseError

log = logging.getLogger(__name__)

KINDS = ("classification", "regression")


@dataclass(frozen=True)
class TaskDataset:
    name: str
    kind: str
    smiles: tuple[str, ...]
    labels: tuple[float, ...]
    counts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")
        if len(self.smiles) != len(self.labels):
            raise ValueError("smiles and labels differ in length")
        if len(set(self.smiles)) != len(self.smiles):
            raise ValueError("canonical SMILES must be unique within a task")
        if self.kind == "classification" and any(y not in (0, 1) for y in self.labels):
            raise ValueError("classification labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.smiles)

    @property
    def positive_rate(self) -> float | None:
        if self.kind != "classification" or not self.labels:
            return None
        return sum(self.labels) / len(self.labels)


def deduplicate(
    rows: Iterable[tuple[str, float]],
    kind: str,
    name: str = "task",
    canonical: bool = False,
) -> TaskDataset:
    """Collapse rows onto canonical SMILES.

    Classification duplicates with conflicting labels are all removed;
    consistent ones collapse to a single record. Regression duplicates are
    averaged. Rows that fail to parse are dropped and counted.

    Args:
        rows: (SMILES, label) pairs.
        kind: "classification" or "regression".
        name: task name carried on the dataset.
        canonical: set when the SMILES are already canonical to skip parsing.

    Raises:
        EmptyDatasetError: if no record survives.
    """
    groups: dict[str, list[float]] = {}
    raw = dropped = 0
    for smi, label in rows:
        raw += 1
        try:
            key = smi if canonical else canonicalize(smi)
        except ParseError as exc:
            log.warning("task %s: dropping unparseable SMILES %r (%s)", name, smi, exc)
            dropped += 1
            continue
        groups.setdefault(key, []).append(float(label))

    smiles, labels = [], []
    dedup_removed = conflict_removed = 0
    for key in sorted(groups):
        vals = groups[key]
        if kind == "classification":
            if len(set(vals)) > 1:
                conflict_removed += len(vals)
                continue
            label = int(vals[0])
        else:
            label = sum(vals) / len(vals)
        dedup_removed += len(vals) - 1
        smiles.append(key)
        labels.append(label)

    counts = {
        "raw": raw,
        "parse_dropped": dropped,
        "dedup_removed": dedup_removed,
        "conflict_removed": conflict_removed,
        "kept": len(smiles),
    }
    if not smiles:
        raise EmptyDatasetError(f"task {name}: no records survive deduplication", counts)
    return TaskDataset(name, kind, tuple(smiles), tuple(labels), counts)
