from __future__ import annotations

import random
from collections import Counter

import numpy as np
import pytest

from qsarbench.chem import Molecule, parse_smiles
from qsarbench.harness.synthetic import generate_series

DRUGLIKE = (
    "CC(=O)Oc1ccccc1C(=O)O",
    "CN1C=NC2=C1C(=O)N(C(=O)N2C)C",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "CC(N)C(=O)O",
    "c1ccc2[nH]ccc2c1",
    "O=[N+]([O-])c1ccccc1",
    "CCN(CC)CC",
    "Clc1ccc(Cl)cc1",
    "OCC1OC(O)C(O)C(O)C1O",
    "c1ccncc1",
    "CS(=O)(=O)N",
    "C1CC1",
    "N#Cc1ccccc1",
    "CC(=O)Nc1ccc(O)cc1",
    "c1ccc2ccccc2c1",
    "O=C1CCCCC1",
    "Brc1ccccc1",
    "CC(C)NCC(O)COc1cccc2ccccc12",
    "CN1CCC(CC1)Oc1ccc(F)cc1",
    "OC(=O)c1ccccc1O",
)


def _corpus() -> list[str]:
    synth = [m.smiles for m in generate_series(80, seed=3)]
    return list(DRUGLIKE) + synth


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    """100 molecules: 20 drug-like inputs plus 80 decorated scaffolds."""
    out = _corpus()
    assert len(out) == 100
    return out


def atom_multiset(m: Molecule) -> Counter:
    return Counter((a.symbol, a.charge, a.aromatic, m.total_h(i)) for i, a in enumerate(m.atoms))


def bond_multiset(m: Molecule) -> Counter:
    out = Counter()
    for b in m.bonds:
        ends = tuple(sorted((m.atoms[b.a].symbol, m.atoms[b.b].symbol)))
        out[(ends, b.code)] += 1
    return out


def _atom_token(m: Molecule, i: int) -> str:
    a = m.atoms[i]
    sym = a.symbol.lower() if a.aromatic else a.symbol
    h = m.total_h(i)
    tok = sym
    if h:
        tok += "H" + (str(h) if h > 1 else "")
    if a.charge:
        sign = "+" if a.charge > 0 else "-"
        tok += sign + (str(abs(a.charge)) if abs(a.charge) > 1 else "")
    return f"[{tok}]"


def _bond_token(m: Molecule, k: int) -> str:
    b = m.bonds[k]
    if b.aromatic:
        return ":"
    return {1: "-", 2: "=", 3: "#"}[b.order]


def random_smiles(m: Molecule, rng: random.Random) -> str:
    """Write ``m`` as SMILES from a random start atom with random branch order.

    Every atom is bracketed with its explicit H count and every bond symbol is
    written, so the string carries the full graph independently of any
    implicit-hydrogen or aromaticity convention.
    """
    n = m.num_atoms
    seen = [False] * n
    order = list(range(n))
    rng.shuffle(order)
    # first pass finds the DFS tree; non-tree bonds become ring closures
    parent_bond: dict[int, int] = {}
    tree_edges: set[int] = set()
    visit_order: list[int] = []
    nbr_order: dict[int, list[tuple[int, int]]] = {}

    def dfs(root: int) -> None:
        stack = [root]
        seen[root] = True
        while stack:
            i = stack.pop()
            visit_order.append(i)
            nbrs = list(m.adjacency[i])
            rng.shuffle(nbrs)
            nbr_order[i] = nbrs
            for j, k in reversed(nbrs):
                if not seen[j]:
                    seen[j] = True
                    parent_bond[j] = k
                    tree_edges.add(k)
                    stack.append(j)

    roots = []
    for r in order:
        if not seen[r]:
            roots.append(r)
            dfs(r)
    ring_edges = [k for k in range(m.num_bonds) if k not in tree_edges]
    labels = {k: idx + 1 for idx, k in enumerate(ring_edges)}
    children: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n)}
    for i in visit_order:
        for j, k in nbr_order[i]:
            if parent_bond.get(j) == k and m.bonds[k].other(j) == i:
                children[i].append((j, k))

    def label(k: int) -> str:
        v = labels[k]
        return str(v) if v < 10 else f"%{v}"

    def emit(i: int) -> str:
        s = _atom_token(m, i)
        for j, k in nbr_order[i]:
            if k in labels:
                s += _bond_token(m, k) + label(k)
        kids = children[i]
        for idx, (j, k) in enumerate(kids):
            sub = _bond_token(m, k) + emit(j)
            s += sub if idx == len(kids) - 1 else f"({sub})"
        return s

    parts = [emit(r) for r in roots]
    return ".".join(parts)


def cross_fold_nn_similarity(bits: np.ndarray, folds) -> np.ndarray:
    """Per molecule, the best Tanimoto to any molecule in a different fold.

    ``bits`` is a dense 0/1 matrix. Intersections come from a matrix product
    (exact in float64 for these counts), independent of the library's
    similarity code.
    """
    B = np.asarray(bits, dtype=np.float64)
    folds = np.asarray(folds)
    counts = B.sum(1)
    inter = B @ B.T
    union = counts[:, None] + counts[None, :] - inter
    sim = np.where(union > 0, inter / np.maximum(union, 1), 1.0)
    sim[folds[:, None] == folds[None, :]] = -1.0
    return sim.max(1)


def planted_labels(flags, p_match: float, p_rest: float, seed: int = 0) -> np.ndarray:
    """Labels with exact active fractions: round(p * count) actives in each group, placed at random."""
    flags = np.asarray(flags, dtype=bool)
    rng = np.random.default_rng(seed)
    y = np.zeros(len(flags))
    for group, p in ((flags, p_match), (~flags, p_rest)):
        idx = np.flatnonzero(group)
        k = int(round(p * len(idx)))
        y[rng.choice(idx, size=k, replace=False)] = 1
    return y


def brute_force_delta(flags, labels) -> tuple[float, float]:
    """(active-rate difference, support) by direct counting."""
    hit = [y for f, y in zip(flags, labels) if f]
    miss = [y for f, y in zip(flags, labels) if not f]
    return sum(hit) / len(hit) - sum(miss) / len(miss), len(hit) / len(flags)


def pair_count_auc(scores, labels) -> float:
    """Fraction of (positive, negative) pairs ordered correctly, ties counting one half."""
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y != 1]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))


def staircase_ap(scores, labels) -> float:
    """Walk the ranking top-down; add precision at every positive, divide by the positive count.

    Assumes distinct scores.
    """
    ranked = sorted(zip(scores, labels), key=lambda t: -t[0])
    hits = 0
    total = 0.0
    for rank, (_, y) in enumerate(ranked, start=1):
        if y == 1:
            hits += 1
            total += hits / rank
    return total / hits


def expected_ap_over_tie_orders(scores, labels) -> float:
    """Average of the staircase AP over every ordering of each tied block (small inputs only)."""
    from itertools import permutations, product

    blocks: dict[float, list[int]] = {}
    for s, y in zip(scores, labels):
        blocks.setdefault(s, []).append(int(y))
    keys = sorted(blocks, reverse=True)
    orders = [sorted(set(permutations(blocks[k]))) for k in keys]
    weights = [1 / len(o) for o in orders]
    total = 0.0
    for combo in product(*orders):
        seq = [y for block in combo for y in block]
        fake = list(range(len(seq), 0, -1))
        w = 1.0
        for wt in weights:
            w *= wt
        total += w * staircase_ap(fake, seq)
    return total


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``with criterion(3, "random PR-AUC tracks prevalence") as note: ...``;
    ``note`` collects detail text shown on the line.
    """
    import contextlib
    import time

    @contextlib.contextmanager
    def run(number: int, title: str):
        details: list[str] = []
        start = time.perf_counter()
        try:
            yield details
        except BaseException:
            ACCEPTANCE_LINES[number] = f"FAIL  criterion {number}: {title} ({'; '.join(details)})"
            raise
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES[number] = f"PASS  criterion {number}: {title} ({'; '.join([*details, f'{elapsed:.1f}s'])})"

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
