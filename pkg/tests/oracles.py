"""Independent reference computations used as test oracles.

Deliberately written the slow, obvious way (plain loops, generic solvers) and
never by calling into the package code they check.
"""
import math

import numpy as np
from scipy.optimize import minimize


def path_length_loop(points):
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        total += math.sqrt(sum((bi - ai) ** 2 for ai, bi in zip(a, b)))
    return total


def axis_travel_loop(points, axis_index):
    return sum(abs(b[axis_index] - a[axis_index]) for a, b in zip(points[:-1], points[1:]))


def extract_columns(lines, columns, delimiter=None):
    out = []
    for line in lines:
        cells = line.split() if delimiter is None else line.split(delimiter)
        out.append([float(cells[c]) for c in columns])
    return out


def covariance_eigen(X):
    """Eigenpairs of the sample covariance, descending, via a dense symmetric solver."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    mean = [sum(X[:, j]) / n for j in range(X.shape[1])]
    cov = np.zeros((X.shape[1], X.shape[1]))
    for a in range(X.shape[1]):
        for b in range(X.shape[1]):
            cov[a, b] = sum((X[i, a] - mean[a]) * (X[i, b] - mean[b]) for i in range(n)) / (n - 1)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order].T


def finite_difference_gradient(f, theta, h=1e-6):
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        grad[i] = (f(theta + e) - f(theta - e)) / (2 * h)
    return grad


def rbf_matrix(X, gamma):
    n = len(X)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            d = np.asarray(X[i], float) - np.asarray(X[j], float)
            K[i, j] = math.exp(-gamma * float(d @ d))
    return K


class DualOracle:
    """Soft-margin SVM dual solved by a general-purpose constrained optimizer."""

    def __init__(self, X, y01, C, gamma):
        self.X = np.asarray(X, dtype=float)
        self.y = 2 * np.asarray(y01, dtype=float) - 1
        self.C = C
        self.gamma = gamma
        K = rbf_matrix(self.X, gamma)
        Q = K * np.outer(self.y, self.y)
        n = len(self.y)
        res = minimize(
            lambda a: 0.5 * a @ Q @ a - a.sum(),
            x0=np.full(n, min(C, 1.0) / 2),
            jac=lambda a: Q @ a - 1.0,
            bounds=[(0.0, C)] * n,
            constraints=[{"type": "eq", "fun": lambda a: a @ self.y, "jac": lambda a: self.y}],
            method="SLSQP",
            options={"ftol": 1e-14, "maxiter": 1000},
        )
        assert res.success, res.message
        a = np.clip(res.x, 0.0, C)
        self.alphas = a
        self.objective = float(a.sum() - 0.5 * a @ Q @ a)
        f_nob = K @ (a * self.y)
        free = (a > 1e-6 * C) & (a < C * (1 - 1e-6))
        if free.any():
            self.bias = float(np.mean(self.y[free] - f_nob[free]))
        else:
            self.bias = 0.0

    def decision(self, x):
        x = np.asarray(x, dtype=float)
        k = np.array([math.exp(-self.gamma * float((xi - x) @ (xi - x))) for xi in self.X])
        return float(k @ (self.alphas * self.y) + self.bias)
