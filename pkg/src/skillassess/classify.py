"""Logistic regression (IRLS) and RBF-kernel SVM (SMO) binary classifiers.

Labels are 0/1 with 1 = expert. The SVM works internally with -1/+1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(message)


class SeparationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LabeledSet:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y).astype(int).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} rows but {y.shape[0]} labels")
        if not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be 0 (novice) or 1 (expert)")
        if not np.isfinite(X).all():
            raise ValueError("feature matrix has non-finite entries")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def has_both_classes(self) -> bool:
        return bool(self.y.min() == 0 and self.y.max() == 1)

    def require_both_classes(self) -> None:
        if self.y.size == 0 or not self.has_both_classes:
            raise ValueError("training data must contain both classes")


def _check_dim(x, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != k:
        raise ValueError(f"expected {k} features, got {x.shape[-1]}")
    return x


# --------------------------------------------------------------------------
# logistic regression

@dataclass(frozen=True, eq=False)
class LrModel:
    beta0: float
    beta: np.ndarray

    def decision_function(self, X) -> np.ndarray:
        X = _check_dim(X, self.beta.shape[0])
        return self.beta0 + X @ self.beta

    def predict_proba(self, X) -> np.ndarray:
        return expit(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) > 0).astype(int)

    def to_dict(self) -> dict:
        return {"kind": "lr", "beta0": self.beta0, "beta": self.beta.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "LrModel":
        return cls(float(d["beta0"]), np.array(d["beta"], dtype=float))


def lr_objective(beta0: float, beta, X, y, l2: float) -> float:
    """Penalized log-likelihood; the intercept is not penalized."""
    beta = np.asarray(beta, dtype=float)
    eta = beta0 + np.asarray(X, dtype=float) @ beta
    # log p = -log(1+e^-eta), log(1-p) = -log(1+e^eta)
    loglik = -(y * np.logaddexp(0, -eta) + (1 - y) * np.logaddexp(0, eta)).sum()
    return float(loglik - 0.5 * l2 * beta @ beta)


def lr_gradient(beta0: float, beta, X, y, l2: float) -> np.ndarray:
    """Gradient of :func:`lr_objective` w.r.t. ``(beta0, *beta)``."""
    beta = np.asarray(beta, dtype=float)
    X = np.asarray(X, dtype=float)
    r = y - expit(beta0 + X @ beta)
    return np.concatenate([[r.sum()], X.T @ r - l2 * beta])


def lr_fit(data: LabeledSet, l2: float = 1e-4, max_iter: int = 100, tol: float = 1e-8,
           blowup: float = 1e6) -> LrModel:
    """Newton / IRLS maximization of the penalized log-likelihood.

    Starts from zero and halves the Newton step until the objective does not
    decrease. Stops when the gradient's 2-norm is at most ``tol``.

    Raises
    ------
    SeparationError
        With ``l2 == 0`` and perfectly separable training data (no finite
        maximum exists), or when coefficients exceed ``blowup``.
    ConvergenceError
        When ``max_iter`` Newton steps do not reach ``tol``.
    """
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    data.require_both_classes()
    X, y = data.X, data.y.astype(float)
    n, k = X.shape
    A = np.hstack([np.ones((n, 1)), X])
    penalty = np.full(k + 1, l2)
    penalty[0] = 0.0
    theta = np.zeros(k + 1)
    obj = lr_objective(theta[0], theta[1:], X, y, l2)
    grad = lr_gradient(theta[0], theta[1:], X, y, l2)
    for _ in range(max_iter):
        if np.linalg.norm(grad) <= tol:
            break
        p = expit(A @ theta)
        hess = (A * (p * (1 - p))[:, None]).T @ A + np.diag(penalty)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        # Steps that lose no more than rounding noise still count as ascent;
        # near the optimum the objective cannot resolve the improvement.
        slack = 64 * np.finfo(float).eps * (n + abs(obj))
        t = 1.0
        cand = theta + step
        cand_obj = lr_objective(cand[0], cand[1:], X, y, l2)
        while cand_obj < obj - slack and t > 1e-10:
            t *= 0.5
            cand = theta + t * step
            cand_obj = lr_objective(cand[0], cand[1:], X, y, l2)
        if cand_obj < obj - slack:
            break  # no ascent direction left; judged by the gradient below
        theta, obj = cand, cand_obj
        grad = lr_gradient(theta[0], theta[1:], X, y, l2)
        if np.abs(theta).max() > blowup:
            raise SeparationError(
                "coefficients diverge (training classes look separable); use l2 > 0")
    grad_norm = float(np.linalg.norm(grad))
    if grad_norm > tol:
        raise ConvergenceError(
            f"IRLS did not reach |grad| <= {tol:g} within {max_iter} iterations "
            f"(|grad| = {grad_norm:.3g})", grad_norm)

    if l2 == 0:
        margin = (2 * y - 1) * (A @ theta)
        if (margin > 0).all():
            raise SeparationError(
                "training classes are perfectly separable, the unpenalized MLE does not exist; use l2 > 0")
    return LrModel(float(theta[0]), theta[1:].copy())


def lr_predict_proba(model: LrModel, x) -> float:
    """Probability of the expert class for a single feature vector."""
    x = _check_dim(x, model.beta.shape[0])
    if x.ndim != 1:
        raise ValueError("lr_predict_proba takes a single vector")
    return float(expit(model.beta0 + x @ model.beta))


# --------------------------------------------------------------------------
# support vector machine

def rbf_kernel(xi, xj, gamma: float) -> float:
    xi = np.asarray(xi, dtype=float)
    xj = np.asarray(xj, dtype=float)
    if xi.shape != xj.shape:
        raise ValueError(f"dimension mismatch: {xi.shape} vs {xj.shape}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    d = xi - xj
    return float(np.exp(-gamma * d @ d))


def rbf_gram(A, B, gamma: float) -> np.ndarray:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    sq = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True, eq=False)
class SvmModel:
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray  # -1 / +1
    bias: float
    gamma: float
    C: float

    def decision_function(self, X) -> np.ndarray:
        X = _check_dim(X, self.support_vectors.shape[1])
        single = X.ndim == 1
        K = rbf_gram(np.atleast_2d(X), self.support_vectors, self.gamma)
        f = K @ (self.alphas * self.labels) + self.bias
        return f[0] if single else f

    def predict(self, X) -> np.ndarray:
        # exact zero goes to novice
        return (np.asarray(self.decision_function(X)) > 0).astype(int)

    def to_dict(self) -> dict:
        return {"kind": "svm", "support_vectors": self.support_vectors.tolist(),
                "alphas": self.alphas.tolist(), "labels": self.labels.tolist(),
                "bias": self.bias, "gamma": self.gamma, "C": self.C}

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        sv = np.array(d["support_vectors"], dtype=float)
        return cls(sv.reshape(len(d["alphas"]), -1), np.array(d["alphas"], dtype=float),
                   np.array(d["labels"], dtype=int), float(d["bias"]), float(d["gamma"]),
                   float(d["C"]))


@dataclass(frozen=True, eq=False)
class SmoResult:
    """Full dual solution over all training points, before pruning."""

    alphas: np.ndarray
    bias: float
    kkt_gap: float
    iterations: int
    objective: float


def dual_objective(alphas, y_pm, K) -> float:
    """``sum(a) - 1/2 a^T Q a`` with ``Q_ij = y_i y_j K_ij``."""
    ay = np.asarray(alphas) * y_pm
    return float(np.sum(alphas) - 0.5 * ay @ K @ ay)


def smo_solve(K: np.ndarray, y_pm: np.ndarray, C: float, tol: float = 1e-6,
              max_iter: int = 100_000) -> SmoResult:
    """Solve the soft-margin dual with maximal-violating-pair SMO.

    Minimizes ``1/2 a^T Q a - sum(a)`` subject to ``0 <= a <= C`` and
    ``y^T a = 0``. The working pair is the first-index maximal violator in
    the "up" set paired with the first-index minimal one in the "low" set;
    the stopping criterion is that the violation gap ``m - M`` is at most
    ``tol``.
    """
    n = y_pm.shape[0]
    y = y_pm.astype(float)
    Q = K * np.outer(y, y)
    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient Q a - e
    gap = np.inf
    it = 0
    for it in range(max_iter + 1):
        score = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        j = int(np.flatnonzero(low)[np.argmin(score[low])])
        gap = float(score[i] - score[j])
        if gap <= tol:
            break
        if it == max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3g})", gap)
        # Move a_i by +t*y_i and a_j by -t*y_j, which keeps y^T a fixed.
        curv = K[i, i] + K[j, j] - 2 * K[i, j]
        t = gap / max(curv, 1e-12)
        t_i = C - alpha[i] if y[i] > 0 else alpha[i]
        t_j = alpha[j] if y[j] > 0 else C - alpha[j]
        t = min(t, t_i, t_j)
        alpha[i] += t * y[i]
        alpha[j] -= t * y[j]
        for idx in (i, j):
            if alpha[idx] < 1e-12 * C:
                alpha[idx] = 0.0
            elif alpha[idx] > C * (1 - 1e-12):
                alpha[idx] = C
        G += t * (y[i] * Q[:, i] - y[j] * Q[:, j])

    score = -y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        bias = float(score[free].mean())
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        hi = score[up].max() if up.any() else score[low].min()
        lo = score[low].min() if low.any() else score[up].max()
        bias = float((hi + lo) / 2)
    return SmoResult(alpha, bias, max(gap, 0.0), it, dual_objective(alpha, y, K))


def svm_fit(data: LabeledSet, C: float = 1.0, gamma: float | None = None, tol: float = 1e-6,
            max_passes: int = 1000) -> SvmModel:
    """Fit an RBF-kernel soft-margin SVM.

    ``gamma`` defaults to ``1 / n_features``. ``max_passes`` bounds the work
    at ``max_passes * n`` pair updates.
    """
    if not C > 0:
        raise ValueError("C must be positive")
    data.require_both_classes()
    X = data.X
    if gamma is None:
        gamma = 1.0 / X.shape[1]
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    y_pm = 2 * data.y - 1
    K = rbf_gram(X, X, gamma)
    res = smo_solve(K, y_pm, C, tol=tol, max_iter=max_passes * X.shape[0])
    sv = res.alphas > 0
    return SvmModel(X[sv].copy(), res.alphas[sv].copy(), y_pm[sv].astype(int), res.bias,
                    float(gamma), float(C))


def svm_predict(model: SvmModel, x) -> int:
    """Class of a single vector: 1 (expert) if the decision value is positive."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("svm_predict takes a single vector")
    return int(model.decision_function(x) > 0)


def median_gamma(X) -> float:
    """``1 / median(squared pairwise distance)``, a common bandwidth heuristic."""
    X = np.asarray(X, dtype=float)
    iu = np.triu_indices(X.shape[0], 1)
    sq = ((X[:, None, :] - X[None, :, :]) ** 2).sum(-1)[iu]
    med = float(np.median(sq)) if sq.size else 0.0
    return 1.0 / med if med > 0 else 1.0
