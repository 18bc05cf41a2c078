import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from qsarbench.errors import FeatureMismatchError, ShapeError
from qsarbench.learners import (
    LearnerConfig,
    SingleClassWarning,
    TrainedModel,
    balanced_weights,
    fit,
    fit_forest,
    fit_gbdt,
    fit_linear,
    fit_logistic,
    fit_ridge,
    logistic_gradient,
    predict,
)
from qsarbench.metrics import roc_auc


def planted(n=500, p=12, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.random((n, p))
    return X, (X[:, 7] > 0.5).astype(float)


# weights -------------------------------------------------------------------


def test_balanced_weights_formula():
    w, single = balanced_weights([0, 0, 0, 1])
    assert not single
    assert w[3] == pytest.approx(2.0)
    assert w[0] == pytest.approx(4 / 6)


def test_balanced_weights_symmetric():
    w, _ = balanced_weights([0, 1])
    assert np.allclose(w, 1.0)


def test_balanced_weights_single_class():
    w, single = balanced_weights([1, 1, 1])
    assert single and np.allclose(w, 1.0)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=60).filter(lambda v: 0 < sum(v) < len(v)))
def test_balanced_weights_equalize_mass(y):
    w, _ = balanced_weights(y)
    y = np.asarray(y)
    assert w[y == 1].sum() == pytest.approx(w[y == 0].sum())
    assert w.sum() == pytest.approx(len(y))


# trees ---------------------------------------------------------------------


@pytest.mark.parametrize("family", ["rf", "extratrees", "gbdt"])
def test_planted_rule_learned(family):
    X, y = planted()
    cfg = LearnerConfig(family, n_estimators=60, seed=1)
    model = fit(cfg, X[:400], y[:400])
    assert roc_auc(predict(model, X[400:]), y[400:]) >= 0.99


def test_forest_constant_labels_regression():
    X, _ = planted(60)
    model = fit_forest(LearnerConfig("rf", kind="regression", n_estimators=10), X, np.full(60, 3.5))
    assert np.all(predict(model, X) == 3.5)


def test_single_class_gives_constant_model():
    X, _ = planted(30)
    with pytest.warns(SingleClassWarning):
        model = fit(LearnerConfig("rf", n_estimators=5), X, np.ones(30))
    assert np.all(predict(model, X) == 1.0)


def test_extratrees_duplicate_rows_invariant():
    X, y = planted(200, 8, seed=3)
    cfg = LearnerConfig("extratrees", n_estimators=20, seed=4)
    w = np.ones(200)
    a = predict(fit(cfg, X, y, w), X)
    b = predict(fit(cfg, np.vstack([X, X]), np.concatenate([y, y]), np.concatenate([w, w]) / 2), X)
    assert np.array_equal(a, b)


def test_single_tree_pure_leaves_reproduce_training_targets():
    rng = np.random.default_rng(5)
    X = rng.random((80, 4))
    y = rng.normal(size=80)
    cfg = LearnerConfig("extratrees", kind="regression", n_estimators=1, max_features=None)
    assert np.allclose(predict(fit(cfg, X, y), X), y)


def test_gbdt_linear_target():
    rng = np.random.default_rng(6)
    x = rng.random((300, 1))
    y = 2 * x[:, 0]
    cfg = LearnerConfig("gbdt", kind="regression", n_estimators=300)
    model = fit_gbdt(cfg, x[:200], y[:200])
    assert np.mean(np.abs(predict(model, x[200:]) - y[200:])) <= 0.05


@pytest.mark.parametrize("kind,y", [("regression", [1.0, 2.0, 3.0, 6.0]), ("classification", [0, 0, 0, 1])])
def test_gbdt_zero_learning_rate_is_initial_constant(kind, y):
    X = np.arange(8.0).reshape(4, 2)
    y = np.asarray(y, dtype=float)
    cfg = LearnerConfig("gbdt", kind=kind, n_estimators=5, learning_rate=0.0, weighting="none")
    pred = predict(fit(cfg, X, y), X)
    assert np.allclose(pred, y.mean())


def test_balanced_weighting_raises_minority_recall():
    rng = np.random.default_rng(8)
    n = 2000
    X = rng.normal(size=(n, 5))
    logits = 2.0 * X[:, 0] + X[:, 1] - 4.5
    y = (rng.random(n) < 1 / (1 + np.exp(-logits))).astype(float)
    assert 0.02 < y.mean() < 0.09
    tr, te = slice(0, 1500), slice(1500, None)
    recall = {}
    for weighting in ("balanced", "none"):
        cfg = LearnerConfig("gbdt", n_estimators=50, weighting=weighting)
        p = predict(fit(cfg, X[tr], y[tr]), X[te])
        recall[weighting] = np.mean(p[y[te] == 1] >= 0.5)
    assert recall["balanced"] >= recall["none"]
    assert recall["balanced"] > 0


def test_model_round_trip(tmp_path):
    X, y = planted(300)
    model = fit(LearnerConfig("gbdt", n_estimators=20), X, y, feature_tag="toy")
    model.save(tmp_path / "m.json")
    back = TrainedModel.load(tmp_path / "m.json")
    Xnew = np.random.default_rng(1).random((1000, X.shape[1]))
    assert np.array_equal(predict(model, Xnew), predict(back, Xnew))


def test_feature_mismatch():
    X, y = planted(50)
    model = fit(LearnerConfig("rf", n_estimators=3), X, y, feature_tag="ecfp4-2048")
    with pytest.raises(FeatureMismatchError):
        predict(model, X[:, :5])
    with pytest.raises(FeatureMismatchError):
        predict(model, X, feature_tag="keys")


def test_shape_errors():
    with pytest.raises(ShapeError):
        fit(LearnerConfig("rf"), np.zeros((5, 2)), np.zeros(4))


def test_config_validation():
    with pytest.raises(ValueError):
        LearnerConfig("svm")
    with pytest.raises(ValueError):
        LearnerConfig("ridge", kind="classification")
    with pytest.raises(ValueError):
        LearnerConfig("gbdt", learning_rate=-0.1)


def test_family_guards():
    with pytest.raises(ValueError):
        fit_forest(LearnerConfig("gbdt"), np.zeros((4, 1)), [0, 1, 0, 1])
    with pytest.raises(ValueError):
        fit_linear(LearnerConfig("rf"), np.zeros((4, 1)), [0, 1, 0, 1])


# linear --------------------------------------------------------------------


def ridge_oracle(X, y, w, lam):
    """Augmented normal equations with an unpenalised intercept column."""
    A = np.hstack([X, np.ones((len(y), 1))])
    P = lam * np.eye(A.shape[1])
    P[-1, -1] = 0.0
    theta = np.linalg.solve(A.T @ (w[:, None] * A) + P, A.T @ (w * y))
    return theta[:-1], theta[-1]


def test_ridge_matches_normal_equations():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(100, 10))
    y = X @ rng.normal(size=10) + rng.normal(size=100)
    w = rng.random(100) + 0.5
    fit_ = fit_ridge(X, y, w, 2.5)
    coef, b = ridge_oracle(X, y, w, 2.5)
    assert np.max(np.abs(fit_.coef - coef)) <= 1e-8
    assert abs(fit_.intercept - b) <= 1e-8


def test_ridge_exact_interpolation():
    rng = np.random.default_rng(10)
    X = rng.normal(size=(50, 4))
    beta = np.array([1.5, -2.0, 0.25, 3.0])
    res = fit_ridge(X, X @ beta + 0.7, np.ones(50), 1e-12)
    assert np.allclose(res.coef, beta, atol=1e-6)
    assert res.intercept == pytest.approx(0.7, abs=1e-6)


def test_logistic_separated_scores_monotone():
    x = np.linspace(-2, 2, 20)[:, None]
    y = (x[:, 0] > 0).astype(float)
    model = fit_linear(LearnerConfig("logistic", reg_lambda=1.0), x, y)
    assert np.all(np.diff(predict(model, x)) > 0)


def own_objective(theta, X, y, w, lam):
    z = X @ theta[:-1] + theta[-1]
    return float(np.sum(w * (np.log1p(np.exp(-np.abs(z))) + np.maximum(z, 0) - y * z)) + 0.5 * lam * theta[:-1] @ theta[:-1])


def own_gradient(theta, X, y, w, lam):
    p = 1 / (1 + np.exp(-(X @ theta[:-1] + theta[-1])))
    r = w * (p - y)
    return np.concatenate([X.T @ r + lam * theta[:-1], [r.sum()]])


def _logistic_problem(seed=11):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(200, 6))
    y = (rng.random(200) < 1 / (1 + np.exp(-(X @ rng.normal(size=6))))).astype(float)
    w, _ = balanced_weights(y)
    return X, y, w


def test_logistic_optimum_gradient_small():
    X, y, w = _logistic_problem()
    res = fit_logistic(X, y, w, 1.0)
    theta = np.append(res.coef, res.intercept)
    assert np.linalg.norm(own_gradient(theta, X, y, w, 1.0)) <= 1e-5
    ref = minimize(own_objective, np.zeros(7), args=(X, y, w, 1.0), jac=own_gradient, method="BFGS", tol=1e-12)
    assert np.allclose(theta, ref.x, atol=1e-4)


def test_logistic_gradient_finite_differences():
    X, y, w = _logistic_problem(12)
    rng = np.random.default_rng(13)
    for _ in range(5):
        theta = rng.normal(size=7)
        g = logistic_gradient(theta[:-1], theta[-1], X, y, w, 0.7)
        h = 1e-6
        fd = np.array(
            [
                (own_objective(theta + h * e, X, y, w, 0.7) - own_objective(theta - h * e, X, y, w, 0.7)) / (2 * h)
                for e in np.eye(7)
            ]
        )
        assert np.linalg.norm(g - fd) <= 1e-4 * np.linalg.norm(fd)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 10.0))
def test_ridge_oracle_property(seed, lam):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(30, 5))
    y = rng.normal(size=30)
    w = rng.random(30) + 0.1
    coef, b = ridge_oracle(X, y, w, lam)
    res = fit_ridge(X, y, w, lam)
    assert np.allclose(res.coef, coef, atol=1e-8) and abs(res.intercept - b) <= 1e-8


def test_logistic_predict_in_unit_interval():
    X, y, _ = _logistic_problem(14)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        model = fit(LearnerConfig("logistic", standardize=True), X, y)
    p = predict(model, X)
    assert np.all((p >= 0) & (p <= 1))
