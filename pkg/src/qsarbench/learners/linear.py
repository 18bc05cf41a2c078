"""Weighted L2 logistic regression (Newton) and ridge regression (closed form)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

GRAD_TOL = 1e-6
MAX_ITER = 1000


@dataclass(frozen=True)
class LinearFit:
    coef: np.ndarray
    intercept: float
    n_iter: int = 0
    converged: bool = True
    grad_norm: float = 0.0


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_objective(beta: np.ndarray, b: float, X, y, w, lam: float) -> float:
    z = X @ beta + b
    # log(1 + e^z) - y z, computed stably
    loss = np.logaddexp(0.0, z) - y * z
    return float(w @ loss + 0.5 * lam * beta @ beta)


def logistic_gradient(beta: np.ndarray, b: float, X, y, w, lam: float) -> np.ndarray:
    r = w * (_sigmoid(X @ beta + b) - y)
    return np.concatenate([X.T @ r + lam * beta, [r.sum()]])


def fit_logistic(X, y, w, lam: float = 1.0, tol: float = GRAD_TOL, max_iter: int = MAX_ITER) -> LinearFit:
    """Minimise sum_i w_i logloss_i + lam/2 |beta|^2 with an unpenalised intercept.

    Damped Newton steps with backtracking on the objective.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n, p = X.shape
    theta = np.zeros(p + 1)
    prior = float(w @ y / w.sum())
    theta[-1] = np.log(max(prior, 1e-12) / max(1 - prior, 1e-12))
    Xa = np.hstack([X, np.ones((n, 1))])
    pen = np.full(p + 1, lam)
    pen[-1] = 0.0
    obj = logistic_objective(theta[:-1], theta[-1], X, y, w, lam)
    g = logistic_gradient(theta[:-1], theta[-1], X, y, w, lam)
    it = 0
    while np.linalg.norm(g) > tol and it < max_iter:
        it += 1
        s = _sigmoid(Xa @ theta)
        h = w * s * (1 - s)
        H = (Xa * h[:, None]).T @ Xa + np.diag(pen)
        H[np.diag_indices_from(H)] += 1e-12 * (1 + np.abs(np.diag(H)))
        try:
            step = sla.solve(H, g, assume_a="pos")
        except (np.linalg.LinAlgError, sla.LinAlgError):
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        while True:
            cand = theta - t * step
            new = logistic_objective(cand[:-1], cand[-1], X, y, w, lam)
            if new <= obj - 1e-4 * t * (g @ step) or t < 1e-10:
                break
            t *= 0.5
        theta, obj = cand, new
        g = logistic_gradient(theta[:-1], theta[-1], X, y, w, lam)
    gn = float(np.linalg.norm(g))
    return LinearFit(theta[:-1].copy(), float(theta[-1]), it, gn <= tol, gn)


def fit_ridge(X, y, w, lam: float = 1.0) -> LinearFit:
    """Minimise sum_i w_i (y_i - x_i beta - b)^2 + lam |beta|^2; intercept unpenalised."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    W = w.sum()
    xm = w @ X / W
    ym = float(w @ y / W)
    Xc = X - xm
    yc = y - ym
    A = (Xc * w[:, None]).T @ Xc + lam * np.eye(X.shape[1])
    rhs = Xc.T @ (w * yc)
    try:
        beta = sla.cho_solve(sla.cho_factor(A), rhs)
    except (np.linalg.LinAlgError, sla.LinAlgError):
        beta = np.linalg.lstsq(A, rhs, rcond=None)[0]
    return LinearFit(beta, float(ym - xm @ beta))
