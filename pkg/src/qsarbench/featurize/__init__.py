"""Fingerprints, structural keys and descriptors, plus matrix assembly."""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..chem import Molecule, parse_smiles
from .descriptors import SLOT_NAMES, DescriptorVector, descriptor_panel
from .ecfp import DEFAULT_NBITS, ecfp
from .fingerprint import BitFingerprint, tanimoto, tanimoto_matrix
from .keys import NKEYS, UNSUPPORTED_KEYS, structural_keys

FEATURE_KINDS = ("ecfp4", "ecfp6", "keys", "descriptors")

__all__ = [
    "BitFingerprint",
    "DescriptorVector",
    "DEFAULT_NBITS",
    "FEATURE_KINDS",
    "SLOT_NAMES",
    "UNSUPPORTED_KEYS",
    "descriptor_panel",
    "ecfp",
    "feature_columns",
    "feature_matrix",
    "load_or_build",
    "structural_keys",
    "tanimoto",
    "tanimoto_matrix",
    "write_feature_csv",
]


def _row_fn(kind: str, nbits: int) -> Callable[[Molecule], np.ndarray]:
    if kind == "ecfp4":
        return lambda m: ecfp(m, 2, nbits).to_array()
    if kind == "ecfp6":
        return lambda m: ecfp(m, 3, nbits).to_array()
    if kind == "keys":
        return lambda m: structural_keys(m).to_array()
    if kind == "descriptors":
        return lambda m: descriptor_panel(m).to_array()
    raise ValueError(f"unknown feature kind {kind!r}; expected one of {FEATURE_KINDS}")


def feature_tag(kind: str, nbits: int = DEFAULT_NBITS) -> str:
    return f"{kind}-{nbits}" if kind.startswith("ecfp") else kind


def feature_columns(kind: str, nbits: int = DEFAULT_NBITS) -> list[str]:
    if kind == "descriptors":
        return list(SLOT_NAMES)
    if kind == "keys":
        return [f"key{i + 1}" for i in range(NKEYS)]
    return [f"{kind}_{i}" for i in range(nbits)]


def feature_matrix(
    mols: Sequence[Molecule | str], kind: str, nbits: int = DEFAULT_NBITS
) -> np.ndarray:
    """Stack per-molecule features in input order.

    Bit features are returned as uint8, descriptors as float64.
    """
    fn = _row_fn(kind, nbits)
    width = len(SLOT_NAMES) if kind == "descriptors" else (NKEYS if kind == "keys" else nbits)
    dtype = np.float64 if kind == "descriptors" else np.uint8
    out = np.zeros((len(mols), width), dtype=dtype)
    for r, m in enumerate(mols):
        if isinstance(m, str):
            m = parse_smiles(m)
        out[r] = fn(m)
    return out


def dataset_hash(smiles: Sequence[str]) -> str:
    h = hashlib.sha256()
    for s in smiles:
        h.update(s.encode())
        h.update(b"\n")
    return h.hexdigest()[:16]


def write_feature_csv(path: Path, smiles: Sequence[str], X: np.ndarray, columns: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["canonical_smiles", *columns])
        for s, row in zip(smiles, X):
            if X.dtype == np.uint8:
                w.writerow([s, *(int(v) for v in row)])
            else:
                w.writerow([s, *(repr(float(v)) for v in row)])


def load_or_build(
    cache_dir: Path, smiles: Sequence[str], kind: str, nbits: int = DEFAULT_NBITS
) -> np.ndarray:
    """Feature matrix from the binary cache keyed by (dataset hash, tag, nbits), else computed and stored."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"{dataset_hash(smiles)}_{kind}_{nbits}.npz"
    if path.exists():
        with np.load(path) as data:
            return data["X"]
    X = feature_matrix(list(smiles), kind, nbits)
    tmp = path.with_suffix(".tmp.npz")
    np.savez_compressed(tmp, X=X)
    tmp.replace(path)
    return X
