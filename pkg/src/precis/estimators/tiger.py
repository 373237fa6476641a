"""TIGER: column-wise square-root lasso regressions assembled into a
precision matrix (Liu & Wang 2017)."""

import numpy as np

from .. import _cd
from ..exceptions import DegenerateColumn, InputValidationError
from ..linalg import as_sample_data
from ._base import PrecisionEstimate, symmetrize_min_magnitude

_SIGMA_TOL = 1e-6
_MAX_ALTERNATIONS = 500


def default_lambda(n, p):
    """The tuning-free choice ``sqrt(log p / n)``."""
    return float(np.sqrt(np.log(p) / n))


def standardize(X):
    """Center columns and scale them to unit standard deviation (divisor n).

    Returns ``(Z, mean, sd)``.
    """
    X = as_sample_data(X)
    mean = X.mean(axis=0)
    sd = np.sqrt(np.mean((X - mean) ** 2, axis=0))
    bad = np.flatnonzero(sd <= 1e-12 * max(1.0, float(np.max(np.abs(X)))))
    if bad.size:
        raise DegenerateColumn(f"column {bad[0]} has zero variance", column=int(bad[0]))
    return (X - mean) / sd, mean, sd


def sqrt_lasso_objective(X, j, beta, lam):
    """``||X_j - X_{-j} b||_2 + lam * sqrt(n) * ||b||_1`` (``beta[j]`` ignored)."""
    n = X.shape[0]
    b = np.array(beta, dtype=float)
    b[j] = 0.0
    return float(np.linalg.norm(X[:, j] - X @ b) + lam * np.sqrt(n) * np.sum(np.abs(b)))


def sqrt_lasso_column(X, j, lam):
    """Square-root lasso of column ``j`` on the other columns.

    Uses the scaled-lasso alternation: ``sigma = ||residual|| / sqrt(n)``,
    then a lasso with penalty ``lam * sigma``, until sigma settles.

    Returns
    -------
    beta : ndarray (p,)
        Coefficients with ``beta[j] = 0``.
    sigma2 : float
        Residual variance ``||X_j - X_{-j} beta||^2 / n``.
    """
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    if not lam > 0:
        raise InputValidationError(f"square-root lasso needs lambda > 0, got {lam}")
    y = X[:, j]
    ynorm = float(np.linalg.norm(y))
    if ynorm <= 1e-12 * np.sqrt(n):
        raise DegenerateColumn(f"column {j} has zero variance", column=j)
    others = np.array([k for k in range(p) if k != j])
    Z = X[:, others]
    Q = np.ascontiguousarray(Z.T @ Z / n)
    b = Z.T @ y / n
    coef = np.zeros(p - 1)
    sigma = ynorm / np.sqrt(n)
    for _ in range(_MAX_ALTERNATIONS):
        _cd.lasso_cd(Q, b, np.full(p - 1, lam * sigma), coef, 1e-12, 100000)
        new_sigma = float(np.linalg.norm(y - Z @ coef)) / np.sqrt(n)
        if new_sigma <= 1e-12 * ynorm:
            raise DegenerateColumn(f"column {j} is fitted exactly by the others", column=j)
        done = abs(new_sigma - sigma) < _SIGMA_TOL * max(1.0, sigma)
        sigma = new_sigma
        if done:
            break
    beta = np.zeros(p)
    beta[others] = coef
    return beta, sigma**2


def tiger(X, lam=None, cfg=None):
    """TIGER precision estimate from raw data.

    Columns are standardized, each is regressed on the rest by the
    square-root lasso, the standardized precision is assembled as
    ``O_jj = 1/sigma_j^2``, ``O_ij = -B_ij/sigma_j^2``, symmetrized by
    smaller magnitude, and mapped back to the original units.
    """
    Z, _, sd = standardize(X)
    n, p = Z.shape
    lam = default_lambda(n, p) if lam is None else float(lam)
    B = np.zeros((p, p))
    sigma2 = np.zeros(p)
    for j in range(p):
        B[:, j], sigma2[j] = sqrt_lasso_column(Z, j, lam)
    raw = -B / sigma2[None, :]
    raw[np.diag_indices(p)] = 1.0 / sigma2
    omega = symmetrize_min_magnitude(raw) / np.outer(sd, sd)
    objective = float(np.sum(np.sqrt(n * sigma2)) + lam * np.sqrt(n) * np.sum(np.abs(B)))
    return PrecisionEstimate(omega, "tiger", lam, None, True, p, objective)
