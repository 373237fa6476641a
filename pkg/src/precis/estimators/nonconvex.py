"""SCAD and MCP penalized precision matrices via local linear approximation.

Each LLA step solves a weighted graphical lasso whose weights are the
penalty derivative at the current estimate, starting from glasso.
"""

import numpy as np

from ..exceptions import InputValidationError
from ..linalg import as_symmetric, log_det_pd
from ._base import DEFAULT_GAMMA, EstimatorConfig, PrecisionEstimate, check_lambda
from .glasso import glasso, weighted_glasso

# objective increases below this relative size are rounding, not ascent
_NOISE = 1e-12


def _check_scad(lam, gamma):
    if lam < 0:
        raise InputValidationError(f"lambda must be nonnegative, got {lam}")
    if not gamma > 2:
        raise InputValidationError(f"SCAD needs gamma > 2, got {gamma}")


def _check_mcp(lam, gamma):
    if lam < 0:
        raise InputValidationError(f"lambda must be nonnegative, got {lam}")
    if not gamma > 1:
        raise InputValidationError(f"MCP needs gamma > 1, got {gamma}")


def scad_weight(x, lam, gamma=3.7):
    """SCAD derivative ``psi'(|x|)``; works on scalars and arrays."""
    _check_scad(lam, gamma)
    a = np.abs(x)
    out = np.where(a <= lam, lam, np.where(a < gamma * lam, (gamma * lam - a) / (gamma - 1.0), 0.0))
    return out if np.ndim(out) else float(out)


def mcp_weight(x, lam, gamma=3.0):
    """MCP derivative ``(lam - |x|/gamma) * 1(|x| <= gamma*lam)``."""
    _check_mcp(lam, gamma)
    a = np.abs(x)
    out = np.where(a <= gamma * lam, lam - a / gamma, 0.0)
    return out if np.ndim(out) else float(out)


def scad_penalty(x, lam, gamma=3.7):
    """SCAD penalty value, the integral of :func:`scad_weight` from 0."""
    _check_scad(lam, gamma)
    a = np.abs(x)
    mid = (2.0 * gamma * lam * a - a**2 - lam**2) / (2.0 * (gamma - 1.0))
    out = np.where(a <= lam, lam * a, np.where(a < gamma * lam, mid, 0.5 * lam**2 * (gamma + 1.0)))
    return out if np.ndim(out) else float(out)


def mcp_penalty(x, lam, gamma=3.0):
    _check_mcp(lam, gamma)
    a = np.abs(x)
    out = np.where(a <= gamma * lam, lam * a - a**2 / (2.0 * gamma), 0.5 * gamma * lam**2)
    return out if np.ndim(out) else float(out)


_PENALTIES = {
    "scad": (scad_weight, scad_penalty),
    "mcp": (mcp_weight, mcp_penalty),
}


def nonconvex_objective(Omega, S, lam, gamma, kind, penalize_diagonal=True):
    """Penalized negative log-likelihood with the SCAD/MCP penalty.

    Off-diagonal entries carry the nonconvex penalty. Diagonal entries keep
    the plain ``lam * |omega_ii|`` term, matching the fixed unit diagonal
    weight used inside the LLA steps (or no term when unpenalized).
    """
    _, penalty = _PENALTIES[kind]
    Omega = np.asarray(Omega, dtype=float)
    off = ~np.eye(Omega.shape[0], dtype=bool)
    pen = float(np.sum(penalty(Omega[off], lam, gamma)))
    if penalize_diagonal:
        pen += lam * float(np.sum(np.abs(np.diag(Omega))))
    return -log_det_pd(Omega) + float(np.sum(S * Omega)) + pen


def lla_weights(Omega, lam, gamma, kind):
    """Relative LLA weights ``psi'(|omega_ij|) / lam``, unit diagonal."""
    weight, _ = _PENALTIES[kind]
    W = weight(Omega, lam, gamma) / lam
    W = (W + W.T) / 2.0
    np.fill_diagonal(W, 1.0)
    return W


def _lla(S, lam, cfg, kind):
    cfg = cfg or EstimatorConfig()
    S = as_symmetric(S, "S")
    lam = check_lambda(lam)
    gamma = DEFAULT_GAMMA[kind] if cfg.gamma is None else float(cfg.gamma)
    (_check_scad if kind == "scad" else _check_mcp)(lam, gamma)

    current = glasso(S, lam, cfg)
    if lam == 0.0:
        current.method, current.gamma_used = kind, gamma
        return current
    iterations = current.iterations
    converged = current.converged
    objective = nonconvex_objective(current.omega, S, lam, gamma, kind, cfg.penalize_diagonal)
    trace = [objective]
    for _ in range(cfg.lla_iters):
        W = lla_weights(current.omega, lam, gamma, kind)
        step = weighted_glasso(S, W, lam, cfg, warm_start=current.omega, method=kind, gamma=gamma)
        new_objective = nonconvex_objective(step.omega, S, lam, gamma, kind, cfg.penalize_diagonal)
        iterations += step.iterations
        if new_objective > objective + _NOISE * max(1.0, abs(objective)):
            # inexact inner solve failed to descend; keep the previous iterate
            break
        converged = step.converged
        current, objective = step, new_objective
        trace.append(objective)
    return PrecisionEstimate(current.omega, kind, lam, gamma, converged, iterations, objective, trace)


def scad(S, lam, cfg=None):
    """SCAD-penalized precision matrix (default gamma 3.7)."""
    return _lla(S, lam, cfg, "scad")


def mcp(S, lam, cfg=None):
    """MCP-penalized precision matrix (default gamma 3)."""
    return _lla(S, lam, cfg, "mcp")
