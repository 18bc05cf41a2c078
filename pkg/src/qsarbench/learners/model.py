"""Fitted-model container, the fit/predict entry points and JSON serialization."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import FeatureMismatchError, ShapeError
from .config import LearnerConfig
from .ensemble import _sigmoid, fit_forest_trees, fit_gbdt_trees, gbdt_raw
from .linear import fit_logistic, fit_ridge
from .tree import Tree
from .weights import balanced_weights

FORMAT_VERSION = 1


class SingleClassWarning(UserWarning):
    pass


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrainedModel:
    family: str
    kind: str
    n_features: int
    feature_tag: str
    config: dict
    meta: dict
    trees: tuple[Tree, ...] = ()
    init: float = 0.0
    coef: np.ndarray | None = None
    intercept: float = 0.0
    center: np.ndarray | None = None
    scale: np.ndarray | None = None
    constant: float | None = None
    warnings: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "family": self.family,
            "kind": self.kind,
            "n_features": self.n_features,
            "feature_tag": self.feature_tag,
            "config": self.config,
            "meta": self.meta,
            "trees": [t.to_dict() for t in self.trees],
            "init": float(self.init),
            "coef": None if self.coef is None else [float(v) for v in self.coef],
            "intercept": float(self.intercept),
            "center": None if self.center is None else [float(v) for v in self.center],
            "scale": None if self.scale is None else [float(v) for v in self.scale],
            "constant": self.constant,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        arr = lambda v: None if v is None else np.asarray(v, dtype=np.float64)  # noqa: E731
        return cls(
            family=d["family"],
            kind=d["kind"],
            n_features=d["n_features"],
            feature_tag=d["feature_tag"],
            config=d["config"],
            meta=d["meta"],
            trees=tuple(Tree.from_dict(t) for t in d["trees"]),
            init=d["init"],
            coef=arr(d["coef"]),
            intercept=d["intercept"],
            center=arr(d["center"]),
            scale=arr(d["scale"]),
            constant=d["constant"],
            warnings=tuple(d["warnings"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        return cls.from_dict(json.loads(text))

    def save(self, path: Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: Path) -> "TrainedModel":
        return cls.from_json(Path(path).read_text())


def _check_shapes(X, y, w):
    if X.ndim != 2:
        raise ShapeError(f"X must be 2-D, got shape {X.shape}")
    if len(y) != X.shape[0] or len(w) != X.shape[0]:
        raise ShapeError(f"rows(X)={X.shape[0]}, len(y)={len(y)}, len(w)={len(w)} must agree")
    if X.shape[0] < 2:
        raise ShapeError("need at least 2 training rows")


def fit(
    config: LearnerConfig,
    X,
    y,
    w=None,
    feature_tag: str = "",
) -> TrainedModel:
    """Fit any learner family.

    ``w=None`` resolves to balanced weights (classification, weighting
    "balanced") or uniform weights otherwise.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    notes: list[str] = []
    if w is None:
        if config.kind == "classification" and config.weighting == "balanced":
            w, single = balanced_weights(y)
        else:
            w = np.ones(len(y))
    w = np.asarray(w, dtype=np.float64)
    _check_shapes(X, y, w)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    meta = {"seed": int(config.seed), "config_hash": config.config_hash(), "n_train": int(len(y))}
    base = dict(
        family=config.family,
        kind=config.kind,
        n_features=int(X.shape[1]),
        feature_tag=feature_tag,
        config=config.to_dict(),
        meta=meta,
    )

    if config.kind == "classification" and len(np.unique(y)) < 2:
        msg = f"single-class training labels ({int(y[0])}); constant-score model"
        warnings.warn(msg, SingleClassWarning, stacklevel=2)
        return TrainedModel(**base, constant=float(y[0]), warnings=(msg,))

    fam = config.family
    if fam in ("rf", "extratrees"):
        trees = fit_forest_trees(
            X,
            y,
            w,
            config.n_estimators,
            config.seed,
            config.n_candidate_features(X.shape[1]),
            config.depth,
            bootstrap=fam == "rf",
        )
        return TrainedModel(**base, trees=tuple(trees), warnings=tuple(notes))
    if fam == "gbdt":
        init, trees = fit_gbdt_trees(X, y, w, config.kind, config.n_estimators, config.learning_rate, config.depth)
        return TrainedModel(**base, trees=tuple(trees), init=init, warnings=tuple(notes))

    center = scale = None
    Xs = X
    if config.standardize:
        W = w.sum()
        center = w @ X / W
        sd = np.sqrt(w @ (X - center) ** 2 / W)
        scale = np.where(sd > 0, sd, 1.0)
        Xs = (X - center) / scale
    if fam == "logistic":
        res = fit_logistic(Xs, y, w, config.reg_lambda)
        if not res.converged:
            msg = f"logistic fit hit the iteration cap (gradient norm {res.grad_norm:.3g})"
            warnings.warn(msg, ConvergenceWarning, stacklevel=2)
            notes.append(msg)
        meta["n_iter"] = res.n_iter
    else:
        res = fit_ridge(Xs, y, w, config.reg_lambda)
    return TrainedModel(
        **base, coef=res.coef, intercept=res.intercept, center=center, scale=scale, warnings=tuple(notes)
    )


def predict(model: TrainedModel, X, feature_tag: str | None = None) -> np.ndarray:
    """Scores in [0, 1] for classification, real values for regression.

    Raises:
        FeatureMismatchError: if the feature tag or width differs from training.
    """
    X = np.asarray(X, dtype=np.float64)
    if feature_tag is not None and feature_tag != model.feature_tag:
        raise FeatureMismatchError(f"model trained on {model.feature_tag!r}, got {feature_tag!r}")
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise FeatureMismatchError(f"model expects {model.n_features} features, got shape {X.shape}")
    if model.constant is not None:
        return np.full(X.shape[0], model.constant)
    fam = model.family
    if fam in ("rf", "extratrees"):
        out = np.zeros(X.shape[0])
        for t in model.trees:
            out += t.predict(X)
        out /= len(model.trees)
        return np.clip(out, 0.0, 1.0) if model.kind == "classification" else out
    if fam == "gbdt":
        F = gbdt_raw(model.init, list(model.trees), model.config["learning_rate"], X)
        return _sigmoid(F) if model.kind == "classification" else F
    if model.center is not None:
        X = (X - model.center) / model.scale
    z = X @ model.coef + model.intercept
    return _sigmoid(z) if fam == "logistic" else z
