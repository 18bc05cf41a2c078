"""Classical learners: forests, gradient boosting, logistic and ridge regression."""

from .config import FAMILIES, LearnerConfig
from .linear import fit_logistic, fit_ridge, logistic_gradient, logistic_objective
from .model import ConvergenceWarning, SingleClassWarning, TrainedModel, fit, predict
from .tree import Tree, TreeData, build_tree
from .weights import balanced_weights


def fit_forest(config: LearnerConfig, X, y, w=None, feature_tag: str = "") -> TrainedModel:
    if config.family not in ("rf", "extratrees"):
        raise ValueError(f"{config.family} is not a forest family")
    return fit(config, X, y, w, feature_tag)


def fit_gbdt(config: LearnerConfig, X, y, w=None, feature_tag: str = "") -> TrainedModel:
    if config.family != "gbdt":
        raise ValueError(f"{config.family} is not gbdt")
    return fit(config, X, y, w, feature_tag)


def fit_linear(config: LearnerConfig, X, y, w=None, feature_tag: str = "") -> TrainedModel:
    if config.family not in ("logistic", "ridge"):
        raise ValueError(f"{config.family} is not a linear family")
    return fit(config, X, y, w, feature_tag)


__all__ = [
    "FAMILIES",
    "ConvergenceWarning",
    "LearnerConfig",
    "SingleClassWarning",
    "TrainedModel",
    "Tree",
    "TreeData",
    "balanced_weights",
    "build_tree",
    "fit",
    "fit_forest",
    "fit_gbdt",
    "fit_linear",
    "fit_logistic",
    "fit_ridge",
    "logistic_gradient",
    "logistic_objective",
    "predict",
]
