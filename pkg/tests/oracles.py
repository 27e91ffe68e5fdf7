"""Independent reference implementations used only to check the package.

Nothing here imports package internals beyond plain data containers;
log-likelihoods, determinants, optima, and integrals are recomputed
from scratch (cofactor expansion, finite differences, quadrature,
scipy optimizers) so agreement is evidence, not tautology.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize


def cofactor_determinant(a: np.ndarray) -> float:
    """Determinant by recursive cofactor expansion along the first row."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    total = 0.0
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += ((-1.0) ** j) * a[0, j] * cofactor_determinant(minor)
    return total


def finite_diff_gradient(f, theta: np.ndarray, step: float = 1e-5) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    grad = np.zeros_like(theta)
    for i in range(theta.size):
        up, down = theta.copy(), theta.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (f(up) - f(down)) / (2 * step)
    return grad


def finite_diff_hessian(f, theta: np.ndarray, step: float = 1e-5) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    n = theta.size
    hess = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            pp, pm, mp, mm = (theta.copy() for _ in range(4))
            pp[i] += step
            pp[j] += step
            pm[i] += step
            pm[j] -= step
            mp[i] -= step
            mp[j] += step
            mm[i] -= step
            mm[j] -= step
            hess[i, j] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * step * step)
    return hess


def logistic_log_lik(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    """Exact (unclamped) logistic log-likelihood via logaddexp."""
    logits = x @ theta
    return float(np.sum(np.where(y == 1, -np.logaddexp(0.0, -logits), -np.logaddexp(0.0, logits))))


def penalized_objective(theta: np.ndarray, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    return logistic_log_lik(theta, x, y) - 0.5 * lam * float(theta @ theta)


def reference_fit(x: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    """Penalized maximizer: scipy BFGS, then exact-Newton refinement.

    BFGS alone stalls around 1e-8 gradients; a few Newton corrections
    with the analytic Hessian push the optimum to machine precision.
    """

    def neg_obj(t):
        return -penalized_objective(t, x, y, lam)

    def neg_grad(t):
        p = 1.0 / (1.0 + np.exp(-np.clip(x @ t, -700, 700)))
        return -(x.T @ (y - p) - lam * t)

    out = minimize(neg_obj, np.zeros(x.shape[1]), jac=neg_grad, method="BFGS",
                   options={"gtol": 1e-10, "maxiter": 500})
    theta = out.x
    for _ in range(8):
        grad = -neg_grad(theta)
        if np.max(np.abs(grad)) < 1e-13:
            break
        theta = theta + np.linalg.solve(information_matrix(theta, x, lam), grad)
    return theta


def information_matrix(theta: np.ndarray, x: np.ndarray, lam: float) -> np.ndarray:
    p = 1.0 / (1.0 + np.exp(-np.clip(x @ theta, -700, 700)))
    w = p * (1.0 - p)
    return (x * w[:, None]).T @ x + lam * np.eye(x.shape[1])


def reference_criterion_value(x_aug: np.ndarray, y_aug: np.ndarray, lam: float) -> float:
    """Independent two-step computation: refit, then evidence formula."""
    theta = reference_fit(x_aug, y_aug, lam)
    sign, logdet = np.linalg.slogdet(information_matrix(theta, x_aug, lam))
    assert sign > 0
    return logistic_log_lik(theta, x_aug, y_aug) - 0.5 * logdet


def grid_log_lik_1d(x: np.ndarray, y: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Log-likelihood of a one-parameter logistic model on a theta grid.

    Uses log sigmoid(s) = -logaddexp(0, -s) with the sign folded in per
    label, one pass over the grid.
    """
    signs = np.where(np.asarray(y) == 1, -1.0, 1.0)
    logits = np.outer(np.asarray(x).reshape(-1), thetas)
    return -np.logaddexp(0.0, signs[:, None] * logits).sum(axis=0)


def log_trapezoid(log_values: np.ndarray, grid: np.ndarray) -> float:
    """log of the trapezoid integral of exp(log_values), overflow-safe."""
    peak = log_values.max()
    return float(np.log(np.trapezoid(np.exp(log_values - peak), grid)) + peak)


def quadrature_log_marginal_1d(
    x: np.ndarray,
    y: np.ndarray,
    lam: float,
    lo: float = -10.0,
    hi: float = 10.0,
    nodes: int = 100_001,
) -> float:
    """log of the Gaussian-prior marginal likelihood, trapezoid rule.

    A flat prior has no proper marginal; callers approximate it with a
    wide Gaussian (tiny lam) instead.
    """
    thetas = np.linspace(lo, hi, nodes)
    log_prior = -0.5 * np.log(2 * np.pi / lam) - 0.5 * lam * thetas**2
    return log_trapezoid(grid_log_lik_1d(x, y, thetas) + log_prior, thetas)


def quadrature_log_marginal_2d(
    x: np.ndarray,
    y: np.ndarray,
    lam: float,
    lo: float = -8.0,
    hi: float = 8.0,
    nodes: int = 401,
) -> float:
    """2-d trapezoid version for two-parameter models."""
    grid = np.linspace(lo, hi, nodes)
    t0, t1 = np.meshgrid(grid, grid, indexing="ij")
    thetas = np.column_stack([t0.ravel(), t1.ravel()])
    logits = x @ thetas.T  # n x nodes^2
    log_lik = np.where(
        (y == 1)[:, None], -np.logaddexp(0.0, -logits), -np.logaddexp(0.0, logits)
    ).sum(axis=0)
    log_prior = -np.log(2 * np.pi / lam) - 0.5 * lam * np.sum(thetas**2, axis=1)
    log_integrand = (log_lik + log_prior).reshape(nodes, nodes)
    peak = log_integrand.max()
    inner = np.trapezoid(np.exp(log_integrand - peak), grid, axis=1)
    return float(np.log(np.trapezoid(inner, grid)) + peak)
