"""Precision-matrix estimators and a name-based dispatcher."""

from ..exceptions import InputValidationError
from ..linalg import sample_covariance
from ._base import (DEFAULT_GAMMA, LIKELIHOOD_METHODS, METHODS, EstimatorConfig,
                    PrecisionEstimate, symmetrize_min_magnitude)
from .adaptive import adaptive_glasso, adaptive_weights
from .clime import clime
from .elastic_net import elastic_net
from .glasso import glasso, weighted_glasso
from .nonconvex import mcp, mcp_weight, scad, scad_weight
from .ridge import ridge
from .tiger import sqrt_lasso_column, tiger

__all__ = [
    "METHODS", "LIKELIHOOD_METHODS", "DEFAULT_GAMMA", "EstimatorConfig", "PrecisionEstimate",
    "adaptive_glasso", "adaptive_weights", "clime", "elastic_net", "glasso", "weighted_glasso",
    "mcp", "mcp_weight", "scad", "scad_weight", "ridge", "sqrt_lasso_column", "tiger",
    "symmetrize_min_magnitude", "fit",
]


def fit(method, X, lam, gamma=None, cfg=None, S=None):
    """Fit ``method`` on data ``X`` at penalty ``lam``.

    ``gamma`` is the elastic-net mixing weight; for adaptive, SCAD and MCP
    it overrides the method default. ``S`` may be passed to reuse a
    precomputed covariance of ``X``.
    """
    if method not in METHODS:
        raise InputValidationError(f"unknown method {method!r}; expected one of {METHODS}")
    cfg = cfg or EstimatorConfig()
    if method == "tiger":
        return tiger(X, lam, cfg)
    if S is None:
        S = sample_covariance(X)
    if method == "glasso":
        return glasso(S, lam, cfg)
    if method == "ridge":
        return ridge(S, lam)
    if method == "elnet":
        if gamma is None:
            raise InputValidationError("elastic net needs gamma")
        return elastic_net(S, lam, gamma, cfg)
    if method == "clime":
        return clime(S, lam, cfg)
    if gamma is not None:
        cfg = EstimatorConfig(**{**cfg.__dict__, "gamma": gamma})
    if method == "adapt":
        return adaptive_glasso(S, lam, cfg, X=X)
    if method == "scad":
        return scad(S, lam, cfg)
    return mcp(S, lam, cfg)
