"""Order-independent seed derivation."""

from __future__ import annotations

import hashlib
from itertools import product
from typing import Iterable


def derive_seed(global_seed: int, task: str, model: str, fold: int) -> int:
    """Stable 64-bit seed for one (task, model, fold) cell.

    The tuple is hashed on its own, so neither task order nor worker count can
    change the result.
    """
    key = f"{int(global_seed)}|{task}|{model}|{int(fold)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def split_seed(global_seed: int, task: str) -> int:
    """Seed for the per-task splitter (SVD and k-means)."""
    return derive_seed(global_seed, task, "__split__", -1) >> 32


def seed_collisions(global_seed: int, tasks: Iterable[str], models: Iterable[str], k: int = 5) -> list[tuple]:
    """Pairs of grid cells that received the same seed (expected empty)."""
    seen: dict[int, tuple] = {}
    clashes = []
    for cell in product(list(tasks), list(models), range(k)):
        s = derive_seed(global_seed, *cell)
        if s in seen:
            clashes.append((seen[s], cell))
        else:
            seen[s] = cell
    return clashes
