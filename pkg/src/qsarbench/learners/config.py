from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, replace

FAMILIES = ("rf", "extratrees", "gbdt", "logistic", "ridge")
KINDS = ("classification", "regression")


@dataclass(frozen=True)
class LearnerConfig:
    """Hyperparameters for one classical learner.

    ``max_depth=None`` means unlimited for forests; gbdt resolves it to 3.
    ``max_features="auto"`` resolves to sqrt(p) for classification forests,
    p/3 for regression forests and all features for gbdt.
    """

    family: str
    kind: str = "classification"
    n_estimators: int = 300
    max_depth: int | None = None
    learning_rate: float = 0.1
    max_features: str | int | float | None = "auto"
    reg_lambda: float = 1.0
    weighting: str = "balanced"
    standardize: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown learner family {self.family!r}")
        if self.kind not in KINDS:
            raise ValueError(f"unknown task kind {self.kind!r}")
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.reg_lambda < 0:
            raise ValueError("reg_lambda must be >= 0")
        if self.weighting not in ("balanced", "none"):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.family == "logistic" and self.kind != "classification":
            raise ValueError("logistic regression requires a classification task")
        if self.family == "ridge" and self.kind != "regression":
            raise ValueError("ridge regression requires a regression task")

    @property
    def depth(self) -> int | None:
        if self.family == "gbdt" and self.max_depth is None:
            return 3
        return self.max_depth

    def n_candidate_features(self, p: int) -> int | None:
        mf = self.max_features
        if mf == "auto":
            if self.family == "gbdt":
                return None
            mf = "sqrt" if self.kind == "classification" else "third"
        if mf is None:
            return None
        if mf == "sqrt":
            return max(1, int(p**0.5))
        if mf == "third":
            return max(1, p // 3)
        if isinstance(mf, float):
            return max(1, int(mf * p))
        return max(1, min(int(mf), p))

    def with_seed(self, seed: int) -> "LearnerConfig":
        return replace(self, seed=seed)

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        d = self.to_dict()
        d.pop("seed")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]
