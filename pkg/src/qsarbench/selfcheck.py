"""Small oracle suite behind ``qsarbench selfcheck``."""

from __future__ import annotations

import sys
import time

import numpy as np

# Table 1 as published: (group, metric) -> (n, ML, GNN, Sequence, LLM-SAR, leading)
EXPECTED_WINNERS = {
    ("ADMET classification", "pr_auc"): (5, 2, 2, 1, 0, "ML/GNN"),
    ("ADMET classification", "roc_auc"): (5, 1, 3, 1, 0, "GNN"),
    ("ADMET regression", "mae"): (3, 2, 1, 0, 0, "ML"),
    ("ADMET regression", "pearson"): (3, 2, 1, 0, 0, "ML"),
    ("Tox21 classification", "pr_auc"): (12, 9, 2, 0, 1, "ML"),
    ("Tox21 classification", "roc_auc"): (12, 6, 4, 2, 0, "ML"),
    ("Anti-infective classification", "pr_auc"): (2, 1, 1, 0, 0, "ML/GNN"),
    ("Anti-infective classification", "roc_auc"): (2, 1, 1, 0, 0, "ML/GNN"),
}

SELFCHECK_SMILES = (
    "CCO",
    "c1ccccc1O",
    "CC(=O)Nc1ccc(O)cc1",
    "c1ccc2ncccc2c1",
    "O=[N+]([O-])c1ccc(Cl)cc1",
    "CN1CCN(CC1)c1ccccc1",
    "OC(=O)C1CCCCC1",
    "Cc1ncc[nH]1",
)


def pair_count_auc(scores, labels) -> float:
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            total += 1.0 if p > n else 0.5 if p == n else 0.0
    return total / (len(pos) * len(neg))


def staircase_ap(scores, labels) -> float:
    """Precision at each positive's rank, averaged; scores must be distinct."""
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    hits, acc = 0, 0.0
    for rank, i in enumerate(order, start=1):
        if labels[i] == 1:
            hits += 1
            acc += hits / rank
    return acc / hits


def _check_roc(n_inst: int) -> str:
    from .metrics import roc_auc

    rng = np.random.default_rng(0)
    for _ in range(n_inst):
        n = int(rng.integers(2, 60))
        y = rng.integers(0, 2, n)
        y[0], y[1] = 0, 1
        s = rng.integers(0, 8, n) / 8.0
        if roc_auc(s, y) != pair_count_auc(s, y):
            raise AssertionError(f"roc_auc disagrees with pair counting on n={n}")
    return f"{n_inst} instances"


def _check_pr(n_inst: int) -> str:
    from .metrics import pr_auc

    rng = np.random.default_rng(1)
    for _ in range(n_inst):
        n = int(rng.integers(2, 40))
        y = rng.integers(0, 2, n)
        y[0] = 1
        s = rng.permutation(n).astype(float)
        if abs(pr_auc(s, y) - staircase_ap(list(s), list(y))) > 1e-12:
            raise AssertionError("pr_auc disagrees with the staircase")
    return f"{n_inst} instances"


def _check_canonical(n_perm: int) -> str:
    from .chem import parse_smiles

    rng = np.random.default_rng(2)
    for smi in SELFCHECK_SMILES:
        mol = parse_smiles(smi)
        ref = mol.smiles
        for _ in range(n_perm):
            order = [int(i) for i in rng.permutation(mol.num_atoms)]
            if mol.permute(order).smiles != ref:
                raise AssertionError(f"canonical form of {smi} depends on atom order")
    return f"{len(SELFCHECK_SMILES)} molecules x {n_perm} permutations"


def _check_ridge() -> str:
    from .learners.linear import fit_ridge

    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 6))
    y = X @ rng.normal(size=6) + rng.normal(scale=0.1, size=40)
    w = np.ones(40)
    fit = fit_ridge(X, y, w, 1.0)
    Xc = X - X.mean(0)
    beta = np.linalg.solve(Xc.T @ Xc + np.eye(6), Xc.T @ (y - y.mean()))
    err = float(np.max(np.abs(fit.coef - beta)))
    if err > 1e-8:
        raise AssertionError(f"ridge differs from the normal equations by {err:g}")
    return f"max |diff| {err:.1e}"


def _check_table1() -> str:
    from .metrics import FAMILIES
    from .report import paper_report

    rep = paper_report(figures=False)
    for (group, metric), exp in EXPECTED_WINNERS.items():
        row = rep.winners.row(group, metric)
        got = (row.n, *row.wins, row.leading)
        if got != exp:
            raise AssertionError(f"{group}/{metric}: got {got}, expected {exp}")
    assert len(FAMILIES) == 4
    return f"{len(EXPECTED_WINNERS)} rows"


def run_selfcheck(quick: bool = False, stream=None) -> bool:
    stream = stream or sys.stdout
    checks = [
        ("roc_auc vs pair counting", lambda: _check_roc(50 if quick else 300)),
        ("pr_auc vs staircase", lambda: _check_pr(20 if quick else 100)),
        ("canonical SMILES permutation invariance", lambda: _check_canonical(5 if quick else 20)),
        ("ridge vs normal equations", _check_ridge),
        ("winner counts from the bundled fixture", _check_table1),
    ]
    ok = True
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            detail = fn()
            status = "PASS"
        except Exception as exc:  # report and keep going
            detail, status, ok = f"{type(exc).__name__}: {exc}", "FAIL", False
        stream.write(f"{status} {name} ({detail}; {time.perf_counter() - t0:.2f}s)\n")
    return ok


__all__ = ["EXPECTED_WINNERS", "pair_count_auc", "run_selfcheck", "staircase_ap"]
