"""Train-fold rule induction from a candidate feature library."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..chem import Molecule, compile_pattern, match_pattern, parse_smiles
from ..featurize.descriptors import DescriptorVector, descriptor_panel
from .library import Candidate, candidate_library
from .rules import DescriptorCondition, SarRule


@dataclass(frozen=True)
class InductionConfig:
    min_support: float = 0.02
    max_support: float = 0.9
    min_abs_delta: float = 0.05
    alpha: float = 1.0


@dataclass(frozen=True)
class CandidateStats:
    name: str
    n_match: int
    n_total: int
    support: float
    delta: float
    active_match: float
    active_rest: float


@dataclass(frozen=True)
class Induction:
    rules: tuple[SarRule, ...]
    stats: tuple[CandidateStats, ...]
    flag: str | None = None


def _as_mol(m: Molecule | str) -> Molecule:
    return parse_smiles(m) if isinstance(m, str) else m


def match_matrix(
    mols: Sequence[Molecule | str],
    candidates: Sequence[Candidate],
    descs: Sequence[DescriptorVector] | None = None,
) -> np.ndarray:
    """Boolean (molecule x candidate) firing matrix."""
    mols = [_as_mol(m) for m in mols]
    needs_desc = any(c.kind == "descriptor" for c in candidates)
    if needs_desc and descs is None:
        descs = [descriptor_panel(m) for m in mols]
    out = np.zeros((len(mols), len(candidates)), dtype=bool)
    for j, c in enumerate(candidates):
        if c.kind == "descriptor":
            cond = DescriptorCondition.parse(c.source)
            out[:, j] = [cond.holds(d) for d in descs]
        else:
            pat = compile_pattern(c.source, "smarts" if c.kind == "smarts" else "text")
            out[:, j] = [match_pattern(m, pat, limit=1) > 0 for m in mols]
    return out


def log_odds_weight(a: int, n1: int, b: int, n0: int, alpha: float = 1.0) -> float:
    """Smoothed log odds ratio between matching (a of n1 active) and other (b of n0) molecules."""
    p1 = (a + alpha) / (n1 + 2 * alpha)
    p0 = (b + alpha) / (n0 + 2 * alpha)
    return math.log(p1 * (1 - p0) / (p0 * (1 - p1)))


def induce_rules(
    train: Sequence[Molecule | str] | None,
    labels: Sequence[float],
    library: Sequence[Candidate] | None = None,
    cfg: InductionConfig = InductionConfig(),
    task: str = "classification",
    fold: int | None = None,
    matrix: np.ndarray | None = None,
) -> Induction:
    """Induce rules whose support and effect size pass the configured bounds.

    For classification, delta is the active-rate difference between matching
    and non-matching molecules and the weight is a Laplace-smoothed log odds
    ratio. For regression, delta is the mean-value difference and doubles as
    the weight. Rules are ordered by |delta| descending, then id.

    Pass ``matrix`` (rows aligned with ``labels``) to skip pattern matching.
    """
    library = tuple(library) if library is not None else candidate_library()
    y = np.asarray(labels, dtype=np.float64)
    F = matrix if matrix is not None else match_matrix(train, library)
    n = len(y)
    if F.shape != (n, len(library)):
        raise ValueError(f"match matrix shape {F.shape} does not fit {n} labels x {len(library)} candidates")
    if task == "classification" and (n == 0 or y.min() == y.max()):
        return Induction((), (), "degenerate_fold")
    stats, rules = [], []
    for j, cand in enumerate(library):
        f = F[:, j]
        k = int(f.sum())
        support = k / n if n else 0.0
        if 0 < k < n:
            m1, m0 = float(y[f].mean()), float(y[~f].mean())
        else:
            m1 = m0 = float(y.mean()) if n else 0.0
        delta = m1 - m0
        stats.append(CandidateStats(cand.name, k, n, support, delta, m1, m0))
        if k == 0 or k == n or not cfg.min_support <= support <= cfg.max_support:
            continue
        if abs(delta) < cfg.min_abs_delta:
            continue
        if task == "classification":
            a = int(y[f].sum())
            b = int(y[~f].sum())
            weight = log_odds_weight(a, k, b, n - k, cfg.alpha)
        else:
            weight = delta
        if weight == 0 or (weight > 0) != (delta > 0):
            continue
        rules.append(
            SarRule(
                cand.name,
                cand.kind,
                cand.source,
                "activating" if delta > 0 else "deactivating",
                weight,
                cand.category,
                "induced",
                delta,
                support,
                fold,
            )
        )
    rules.sort(key=lambda r: (-abs(r.delta), r.rule_id))
    return Induction(tuple(rules), tuple(stats))
