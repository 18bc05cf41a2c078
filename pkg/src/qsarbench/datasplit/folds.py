"""Structure-separated fold assignment and fold-file persistence."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ..featurize import ecfp
from ..chem import parse_smiles
from .dedup import TaskDataset
from .kmeans import minibatch_kmeans
from .svd import project_svd

FLAG_NAMES = ("small_test", "zero_positives", "degenerate_cluster")


@dataclass(frozen=True)
class SplitConfig:
    nbits: int = 2048
    d: int = 64
    k: int = 5
    seed: int = 0
    batch_size: int = 256
    n_iter: int = 100
    n_init: int = 3
    min_test: int = 30
    min_test_frac: float = 0.01
    min_positives: int = 5


@dataclass(frozen=True)
class FoldAssignment:
    task: str
    smiles: tuple[str, ...]
    folds: tuple[int, ...]
    sizes: tuple[int, ...]
    positives: tuple[int, ...] | None
    flags: tuple[tuple[str, ...], ...]
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.sizes)

    def test_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.folds) == fold)

    def train_index(self, fold: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.folds) != fold)


def fold_flags(
    folds: np.ndarray, labels: np.ndarray | None, k: int, cfg: SplitConfig = SplitConfig()
) -> tuple[tuple[int, ...], tuple[int, ...] | None, tuple[tuple[str, ...], ...]]:
    """Sizes, positive counts and quality flags per fold."""
    n = len(folds)
    sizes = tuple(int(np.sum(folds == f)) for f in range(k))
    threshold = max(cfg.min_test, cfg.min_test_frac * n)
    pos = None
    if labels is not None:
        pos = tuple(int(np.sum(labels[folds == f])) for f in range(k))
    flags = []
    for f in range(k):
        fl = []
        small = sizes[f] < threshold
        if pos is not None and pos[f] < cfg.min_positives:
            small = True
        if small:
            fl.append("small_test")
        if pos is not None and pos[f] == 0:
            fl.append("zero_positives")
        train = folds != f
        degenerate = sizes[f] == 0 or not np.any(train)
        if labels is not None and np.any(train) and len(np.unique(labels[train])) < 2:
            degenerate = True
        if degenerate:
            fl.append("degenerate_cluster")
        flags.append(tuple(fl))
    return sizes, pos, tuple(flags)


def ecfp4_matrix(smiles, nbits: int) -> sp.csr_matrix:
    rows, cols = [], []
    for r, s in enumerate(smiles):
        bits = sorted(ecfp(parse_smiles(s), 2, nbits).bits)
        rows.extend([r] * len(bits))
        cols.extend(bits)
    data = np.ones(len(rows), dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(len(smiles), nbits))


def assign_folds(dataset: TaskDataset, cfg: SplitConfig = SplitConfig()) -> FoldAssignment:
    """ECFP4, then truncated SVD, then mini-batch k-means; cluster index is the fold index."""
    X = ecfp4_matrix(dataset.smiles, cfg.nbits)
    n = X.shape[0]
    distinct_bits = int(np.count_nonzero(np.asarray(X.sum(axis=0)).ravel()))
    d = max(1, min(cfg.d, n - 1, distinct_bits))
    Y = project_svd(X, d, cfg.seed)
    result = minibatch_kmeans(Y, cfg.k, cfg.seed, cfg.batch_size, cfg.n_iter, cfg.n_init)
    folds = result.labels.astype(int)
    labels = np.asarray(dataset.labels) if dataset.kind == "classification" else None
    sizes, pos, flags = fold_flags(folds, labels, cfg.k, cfg)
    meta = {
        "task": dataset.name,
        "kind": dataset.kind,
        "config": asdict(cfg),
        "svd_components": d,
        "svd_centering": False,
        "small_test_rule": f"size < max({cfg.min_test}, {cfg.min_test_frac} * n) or positives < {cfg.min_positives}",
        "counts": dict(dataset.counts),
        "n": n,
        "inertia": result.inertia,
    }
    return FoldAssignment(dataset.name, dataset.smiles, tuple(int(f) for f in folds), sizes, pos, flags, meta)


def random_folds(n: int, k: int = 5, seed: int = 0) -> np.ndarray:
    """Uniform random fold labels of near-equal size (the leakage comparator)."""
    rng = np.random.default_rng(seed)
    return rng.permutation(np.arange(n) % k)


def fold_csv_text(fa: FoldAssignment) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["canonical_smiles", "fold", "flags"])
    for s, f in zip(fa.smiles, fa.folds):
        w.writerow([s, f, ";".join(fa.flags[f])])
    return buf.getvalue()


def fold_sidecar_text(fa: FoldAssignment) -> str:
    side = {
        **fa.meta,
        "sizes": list(fa.sizes),
        "positives": list(fa.positives) if fa.positives is not None else None,
        "flags": [list(f) for f in fa.flags],
    }
    return json.dumps(side, indent=2, sort_keys=True) + "\n"


def write_folds(fa: FoldAssignment, directory: Path) -> Path:
    """Write ``<task>.folds.csv`` and its JSON sidecar; returns the CSV path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{fa.task}.folds.csv"
    path.write_text(fold_csv_text(fa))
    (directory / f"{fa.task}.folds.json").write_text(fold_sidecar_text(fa))
    return path


def read_folds(path: Path) -> FoldAssignment:
    path = Path(path)
    side = json.loads(path.with_name(path.name.replace(".folds.csv", ".folds.json")).read_text())
    smiles, folds = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            smiles.append(row["canonical_smiles"])
            folds.append(int(row["fold"]))
    pos = side.get("positives")
    return FoldAssignment(
        side["task"],
        tuple(smiles),
        tuple(folds),
        tuple(side["sizes"]),
        tuple(pos) if pos is not None else None,
        tuple(tuple(f) for f in side["flags"]),
        {k: v for k, v in side.items() if k not in ("sizes", "positives", "flags")},
    )
