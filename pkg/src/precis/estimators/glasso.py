"""Graphical lasso with element-wise penalty weights.

The solver is blockwise coordinate descent on the working covariance
(Friedman, Hastie & Tibshirani 2008): each column is a lasso problem on the
remaining block of the working covariance.
"""

import numpy as np

from .. import _cd
from ..exceptions import InputValidationError, NumericalError
from ..linalg import as_symmetric, invert_pd, is_pd, log_det_pd, symmetrize
from ._base import EstimatorConfig, PrecisionEstimate, check_lambda

_INNER_MAX_SWEEPS = 10000


def penalty_matrix(W, lam, penalize_diagonal=True):
    """``lam * W`` with the diagonal zeroed when it is not penalized."""
    Lam = lam * np.asarray(W, dtype=float)
    if not penalize_diagonal:
        Lam = Lam.copy()
        np.fill_diagonal(Lam, 0.0)
    return Lam


def weighted_objective(Omega, S, Lam):
    """``-log det Omega + tr(S Omega) + sum Lam_ij |omega_ij|``."""
    return -log_det_pd(Omega) + float(np.sum(S * Omega)) + float(np.sum(Lam * np.abs(Omega)))


def _as_weights(W, p):
    W = np.asarray(W, dtype=float)
    if W.shape != (p, p):
        raise InputValidationError(f"weight matrix shape {W.shape} does not match p={p}")
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise InputValidationError("weights must be finite and nonnegative")
    if not np.array_equal(W, W.T):
        raise InputValidationError("weight matrix is not symmetric")
    return W


def weighted_glasso(S, W, lam, cfg=None, warm_start=None, method="glasso", gamma=None):
    """Minimize ``-log det O + tr(S O) + lam * sum W_ij |o_ij|`` over PD ``O``.

    Parameters
    ----------
    S : ndarray (p, p)
        Symmetric sample covariance.
    W : ndarray (p, p)
        Symmetric nonnegative penalty weights.
    lam : float
        Overall penalty level.
    cfg : EstimatorConfig, optional
    warm_start : ndarray (p, p), optional
        A PD precision matrix used to initialize the working covariance.

    Returns
    -------
    PrecisionEstimate
    """
    cfg = cfg or EstimatorConfig()
    S = as_symmetric(S, "S")
    p = S.shape[0]
    W = _as_weights(W, p)
    lam = check_lambda(lam)
    Lam = penalty_matrix(W, lam, cfg.penalize_diagonal)

    if not np.any(Lam):
        # unpenalized problem: the MLE
        omega = invert_pd(S)
        return PrecisionEstimate(omega, method, lam, gamma, True, 0,
                                 weighted_objective(omega, S, Lam))

    diag = np.diag(S) + np.diag(Lam)
    if warm_start is not None and is_pd(warm_start):
        Wc = invert_pd(warm_start)
        B = -warm_start / np.diag(warm_start)[None, :]
    else:
        Wc = S.copy()
        B = np.zeros((p, p))
    Wc[np.diag_indices(p)] = diag
    np.fill_diagonal(B, 0.0)
    Wc = np.ascontiguousarray(Wc)
    B = np.ascontiguousarray(B)

    off = ~np.eye(p, dtype=bool)
    scale = np.mean(np.abs(S[off]))
    tol_abs = cfg.tol * scale
    inner_tol = min(1e-8, cfg.tol * 1e-4)
    status, iters, _ = _cd.glasso_bcd(
        np.ascontiguousarray(S), np.ascontiguousarray(Lam), Wc, B,
        tol_abs, cfg.max_iter, inner_tol, _INNER_MAX_SWEEPS,
    )
    if status == _cd.STATUS_NOT_PD:
        raise NumericalError(
            f"working covariance lost positive definiteness at iteration {iters}",
            iteration=iters,
        )
    omega = symmetrize(_cd.precision_from_bcd(Wc, B))
    try:
        objective = weighted_objective(omega, S, Lam)
    except ArithmeticError as exc:
        raise NumericalError(f"estimate is not positive definite: {exc}", iteration=iters) from None
    return PrecisionEstimate(omega, method, lam, gamma, status == _cd.STATUS_OK, iters, objective)


def glasso(S, lam, cfg=None, warm_start=None):
    """Graphical lasso: uniform L1 penalty on all entries."""
    S = as_symmetric(S, "S")
    return weighted_glasso(S, np.ones_like(S), lam, cfg, warm_start, method="glasso")
