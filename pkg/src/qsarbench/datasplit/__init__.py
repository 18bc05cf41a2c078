"""Deduplication and structure-separated five-fold splitting."""

from .dedup import TaskDataset, deduplicate
from .folds import (
    FLAG_NAMES,
    FoldAssignment,
    SplitConfig,
    assign_folds,
    fold_csv_text,
    fold_flags,
    fold_sidecar_text,
    random_folds,
    read_folds,
    write_folds,
)
from .kmeans import KMeansResult, minibatch_kmeans
from .svd import project_svd, randomized_svd

__all__ = [
    "FLAG_NAMES",
    "FoldAssignment",
    "KMeansResult",
    "SplitConfig",
    "TaskDataset",
    "assign_folds",
    "deduplicate",
    "fold_csv_text",
    "fold_flags",
    "fold_sidecar_text",
    "minibatch_kmeans",
    "project_svd",
    "random_folds",
    "randomized_svd",
    "read_folds",
    "write_folds",
]
