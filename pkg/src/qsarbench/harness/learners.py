"""Built-in cell runners: classical learners and the rule-based SAR baseline."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from ..chem import parse_smiles
from ..errors import ConfigError
from ..featurize.descriptors import descriptor_panel
from ..learners import LearnerConfig, fit, predict
from ..sar import RuleSet, candidate_library, fold_ruleset, load_rule_pack, match_matrix, score_many
from .config import LearnerSpec, ModelSpec, register_learner

LEARNER_PARAMS = ("n_estimators", "max_depth", "learning_rate", "max_features", "reg_lambda", "weighting", "standardize")


@dataclass
class CellInput:
    task: str
    kind: str
    fold: int
    seed: int
    model: ModelSpec
    train_smiles: tuple[str, ...]
    test_smiles: tuple[str, ...]
    y_train: np.ndarray
    X_train: np.ndarray | None = None
    X_test: np.ndarray | None = None
    source: Path | None = None


@dataclass
class CellOutput:
    scores: np.ndarray
    warnings: list[str] = field(default_factory=list)
    rules: list[dict] = field(default_factory=list)


def learner_config(model: ModelSpec, family: str, kind: str, seed: int = 0) -> LearnerConfig:
    """LearnerConfig from model params; linear models on descriptors are standardized by default."""
    params = dict(model.params)
    bad = sorted(set(params) - set(LEARNER_PARAMS))
    if bad:
        raise ConfigError(f"model {model.id}: unknown params {bad}; allowed {LEARNER_PARAMS}")
    if family in ("logistic", "ridge"):
        params.setdefault("standardize", model.features == "descriptors")
    try:
        return LearnerConfig(family=family, kind=kind, seed=seed, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"model {model.id}: {exc}") from None


def _family(learner: str, kind: str) -> str:
    if learner == "linear":
        return "logistic" if kind == "classification" else "ridge"
    return learner


def _run_classical(cell: CellInput) -> CellOutput:
    cfg = learner_config(cell.model, _family(cell.model.learner, cell.kind), cell.kind, cell.seed)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = fit(cfg, cell.X_train, cell.y_train, feature_tag=cell.model.features or "")
    scores = predict(model, cell.X_test, cell.model.features or "")
    return CellOutput(scores, [str(w.message) for w in caught] + list(model.warnings))


def _check_classical(model: ModelSpec, kind: str) -> None:
    learner_config(model, _family(model.learner, kind), kind)


@lru_cache(maxsize=64)
def _load_pack(path: str) -> RuleSet:
    return load_rule_pack(path)


def resolve_pack(name: str, source: Path | None = None) -> RuleSet:
    """Bundled pack by bare name, else a path relative to the config directory."""
    p = Path(name)
    if source is not None and not p.is_absolute() and (Path(source) / p).exists():
        return _load_pack(str(Path(source) / p))
    return _load_pack(name)


def rule_to_dict(r) -> dict:
    return {
        "rule_id": r.rule_id,
        "kind": r.kind,
        "source": r.source,
        "direction": r.direction,
        "weight": r.weight,
        "category": r.category,
        "origin": r.origin,
        "delta": r.delta,
        "support": r.support,
        "fold": r.fold,
    }


def _run_sar(cell: CellInput) -> CellOutput:
    m = cell.model
    priors = resolve_pack(m.pack_for(cell.task), cell.source)
    train = [parse_smiles(s) for s in cell.train_smiles]
    test = [parse_smiles(s) for s in cell.test_smiles]
    library = candidate_library(m.flavor)
    matrix = None
    if m.mode == "with_knowledge":
        descs = [descriptor_panel(x) for x in train]
        matrix = match_matrix(train, library, descs)
    rs, ind = fold_ruleset(priors, cell.y_train, m.mode, train, library, fold=cell.fold, matrix=matrix)
    scores = score_many(rs, test)
    notes = []
    if ind is not None and ind.flag:
        notes.append(f"induction: {ind.flag}")
    rules = [rule_to_dict(r) for r in (ind.rules if ind is not None else ())]
    return CellOutput(scores, notes, rules)


def _check_sar(model: ModelSpec, kind: str) -> None:
    if model.params:
        raise ConfigError(f"model {model.id}: the sar learner takes no params")


for _name, _kinds in (
    ("rf", ("classification", "regression")),
    ("extratrees", ("classification", "regression")),
    ("gbdt", ("classification", "regression")),
    ("logistic", ("classification",)),
    ("ridge", ("regression",)),
    ("linear", ("classification", "regression")),
):
    register_learner(LearnerSpec(_name, _kinds, True, _run_classical, _check_classical), replace=True)
register_learner(LearnerSpec("sar", ("classification", "regression"), False, _run_sar, _check_sar), replace=True)
