"""Rule-set scoring and per-fold rule-set assembly."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from ..chem import Molecule
from ..featurize.descriptors import DescriptorVector, descriptor_panel
from .induce import Induction, InductionConfig, induce_rules
from .library import Candidate
from .rules import RuleSet, SarRule, logit


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def raw_score(rs: RuleSet, fired: Sequence[bool]) -> float:
    return rs.intercept + sum(r.weight for r, on in zip(rs.rules, fired) if on)


def score_molecule(rs: RuleSet, mol: Molecule, desc: DescriptorVector | None = None) -> float:
    """logistic(intercept + sum of fired weights), or the raw sum for regression sets."""
    if desc is None and any(r.kind == "descriptor" for r in rs.rules):
        desc = descriptor_panel(mol)
    z = raw_score(rs, [r.fires(mol, desc) for r in rs.rules])
    return _sigmoid(z) if rs.task == "classification" else z


def fired_matrix(rs: RuleSet, mols: Sequence[Molecule], descs: Sequence[DescriptorVector] | None = None) -> np.ndarray:
    if descs is None and any(r.kind == "descriptor" for r in rs.rules):
        descs = [descriptor_panel(m) for m in mols]
    out = np.zeros((len(mols), len(rs.rules)), dtype=bool)
    for j, r in enumerate(rs.rules):
        out[:, j] = [r.fires(m, descs[i] if descs is not None else None) for i, m in enumerate(mols)]
    return out


def score_many(rs: RuleSet, mols: Sequence[Molecule], descs=None, fired: np.ndarray | None = None) -> np.ndarray:
    if fired is None:
        fired = fired_matrix(rs, mols, descs)
    w = np.array([r.weight for r in rs.rules], dtype=np.float64)
    z = rs.intercept + (fired.astype(np.float64) @ w if len(w) else np.zeros(fired.shape[0]))
    if rs.task != "classification":
        return z
    return np.array([_sigmoid(v) for v in z])


def train_intercept(labels: Sequence[float], task: str) -> float:
    y = np.asarray(labels, dtype=np.float64)
    if task == "classification":
        return logit(float(y.mean()))
    return float(y.mean())


def compose(priors: RuleSet, induced: Sequence[SarRule]) -> RuleSet:
    """Knowledge-mode rule set: priors unchanged, then induced rules (renamed on id clash)."""
    taken = {r.rule_id for r in priors.rules}
    extra = []
    for r in induced:
        rid = r.rule_id
        if rid in taken:
            rid = f"induced_{rid}"
            n = 2
            while rid in taken:
                rid = f"induced{n}_{r.rule_id}"
                n += 1
        taken.add(rid)
        extra.append(r.renamed(rid) if rid != r.rule_id else r)
    return replace(priors, mode="with_knowledge", rules=priors.rules + tuple(extra))


def fold_ruleset(
    priors: RuleSet,
    train_labels: Sequence[float],
    mode: str,
    train_mols: Sequence[Molecule] | None = None,
    library: Sequence[Candidate] | None = None,
    cfg: InductionConfig = InductionConfig(),
    fold: int | None = None,
    matrix: np.ndarray | None = None,
) -> tuple[RuleSet, Induction | None]:
    """Rule set for one held-out fold; the intercept is fitted on the train labels."""
    base = priors.with_intercept(train_intercept(train_labels, priors.task))
    if mode == "priors_only":
        return base, None
    ind = induce_rules(train_mols, train_labels, library, cfg, priors.task, fold, matrix)
    return compose(base, ind.rules), ind
