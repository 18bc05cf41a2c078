from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MismatchError


@dataclass(frozen=True)
class BitFingerprint:
    """Fixed-length bit vector stored as its set-bit indices."""

    nbits: int
    bits: frozenset[int]
    tag: str

    def __post_init__(self):
        if any(b < 0 or b >= self.nbits for b in self.bits):
            raise ValueError("bit index out of range")

    @property
    def count(self) -> int:
        return len(self.bits)

    def to_array(self, dtype=np.uint8) -> np.ndarray:
        arr = np.zeros(self.nbits, dtype=dtype)
        if self.bits:
            arr[list(self.bits)] = 1
        return arr


def tanimoto(a: BitFingerprint, b: BitFingerprint) -> float:
    """|a & b| / |a | b|; two empty fingerprints are identical (1.0)."""
    if a.nbits != b.nbits or a.tag != b.tag:
        raise MismatchError(f"cannot compare {a.tag}/{a.nbits} with {b.tag}/{b.nbits}")
    union = len(a.bits | b.bits)
    if union == 0:
        return 1.0
    return len(a.bits & b.bits) / union


def tanimoto_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise Tanimoto between rows of two 0/1 matrices."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    inter = A @ B.T
    union = A.sum(1)[:, None] + B.sum(1)[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(union > 0, inter / np.where(union > 0, union, 1), 1.0)
    return sim
