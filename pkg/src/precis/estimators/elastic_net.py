"""Graphical elastic net.

Objective: ``-log det O + tr(S O) + lam * (g ||O||_1 + (1-g)/2 ||O||_F^2)``.
Solved by proximal Newton steps whose direction comes from coordinate
descent on the local quadratic model (QUIC-style, Hsieh et al. 2014), with
the ridge term kept exact inside each coordinate update.
"""

import numpy as np

from .. import _cd
from ..exceptions import InputValidationError, NotPositiveDefinite, NumericalError
from ..linalg import as_symmetric, cholesky_pd, invert_pd, log_det_pd, symmetrize
from ._base import EstimatorConfig, PrecisionEstimate, check_lambda
from .glasso import glasso
from .ridge import ridge

_ARMIJO = 1e-4
_MAX_HALVINGS = 30


def elastic_net_objective(Omega, S, lam, gamma, penalize_diagonal=True):
    l1 = np.abs(Omega)
    if not penalize_diagonal:
        l1 = l1 - np.diag(np.diag(l1))
    return (-log_det_pd(Omega) + float(np.sum(S * Omega))
            + lam * (gamma * float(np.sum(l1)) + 0.5 * (1.0 - gamma) * float(np.sum(Omega**2))))


def check_gamma(gamma):
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise InputValidationError(f"elastic-net gamma must lie in [0, 1], got {gamma}")
    return gamma


def _smooth_value(X, S, mu):
    return -log_det_pd(X) + float(np.sum(S * X)) + 0.5 * mu * float(np.sum(X**2))


def prox_newton(S, Lam, mu, cfg, method="elnet", lam=0.0, gamma=None):
    """Minimize ``-log det X + tr(SX) + mu/2 ||X||^2 + sum Lam_ij |X_ij|``."""
    p = S.shape[0]
    S = np.ascontiguousarray(S)
    Lam = np.ascontiguousarray(Lam)
    X = np.diag(1.0 / (np.diag(S) + np.diag(Lam) + mu))
    W = invert_pd(X)
    f = _smooth_value(X, S, mu)
    h = float(np.sum(Lam * np.abs(X)))
    trace = [f + h]
    iu = np.triu_indices(p)
    # optimality residual threshold; tight so that the endpoints
    # (pure ridge, pure lasso) agree with their dedicated solvers
    stop = cfg.tol * 1e-4 * max(1.0, float(np.max(np.abs(S))))
    converged = False
    for it in range(1, cfg.max_iter + 1):
        G = S - W + mu * X
        # minimum-norm subgradient
        sub = np.where(X != 0, G + Lam * np.sign(X), np.sign(G) * np.maximum(np.abs(G) - Lam, 0.0))
        if np.max(np.abs(sub)) <= stop:
            converged = True
            break
        free = (X[iu] != 0) | (np.abs(G[iu]) > Lam[iu])
        rows = iu[0][free].astype(np.int64)
        cols = iu[1][free].astype(np.int64)
        sweeps = min(1 + it // 3, 20)
        D = _cd.newton_direction_cd(X, W, S, Lam, mu, rows, cols, sweeps)
        if not np.any(D):
            converged = True
            break
        decrease = float(np.sum(G * D)) + float(np.sum(Lam * np.abs(X + D))) - h
        alpha = 1.0
        for _ in range(_MAX_HALVINGS):
            X_new = symmetrize(X + alpha * D)
            try:
                cholesky_pd(X_new)
                f_new = _smooth_value(X_new, S, mu)
            except NotPositiveDefinite:
                alpha *= 0.5
                continue
            h_new = float(np.sum(Lam * np.abs(X_new)))
            if f_new + h_new <= f + h + _ARMIJO * alpha * decrease:
                break
            alpha *= 0.5
        else:
            raise NumericalError(f"line search failed at Newton step {it}", iteration=it)
        X, f, h = X_new, f_new, h_new
        W = invert_pd(X)
        trace.append(f + h)
    return PrecisionEstimate(X, method, lam, gamma, converged, len(trace) - 1, f + h, trace)


def elastic_net(S, lam, gamma, cfg=None):
    """Graphical elastic net at penalty ``lam`` and mixing ``gamma``.

    ``gamma = 1`` is the graphical lasso and is delegated to it.
    """
    cfg = cfg or EstimatorConfig()
    S = as_symmetric(S, "S")
    lam = check_lambda(lam)
    gamma = check_gamma(gamma)
    if gamma == 1.0:
        est = glasso(S, lam, cfg)
        est.method, est.gamma_used = "elnet", gamma
        return est
    if lam == 0.0:
        est = ridge(S, 0.0)
        est.method, est.gamma_used = "elnet", gamma
        return est
    Lam = np.full(S.shape, lam * gamma)
    if not cfg.penalize_diagonal:
        np.fill_diagonal(Lam, 0.0)
    return prox_newton(S, Lam, lam * (1.0 - gamma), cfg, "elnet", lam, gamma)
