"""Adaptive graphical lasso: glasso with data-driven per-entry weights."""

import numpy as np

from ..exceptions import InputValidationError
from ..linalg import as_symmetric, invert_pd, is_pd, ledoit_wolf_linear
from ._base import DEFAULT_GAMMA, WEIGHT_SOURCES, EstimatorConfig
from .glasso import glasso, weighted_glasso

WEIGHT_CAP = 1e10
_DENOM_FLOOR = 1e-10


def _reciprocal(denom):
    out = np.full(denom.shape, WEIGHT_CAP)
    ok = denom >= _DENOM_FLOOR
    out[ok] = 1.0 / denom[ok]
    return out


def adaptive_weights(source, S, X=None, gamma=0.5, cfg=None, lam=None):
    """Adaptive penalty weights.

    ``inv-abs-cov`` gives ``1/|s_ij|``; the other sources give
    ``1/|w_ij|**gamma`` for a pilot precision ``w`` taken from glasso
    (at ``lam``), ``inv(S)``, or the inverse Ledoit-Wolf covariance
    (needs the data ``X``). Denominators below 1e-10 map to 1e10.
    """
    if source not in WEIGHT_SOURCES:
        raise InputValidationError(f"unknown weight source {source!r}")
    gamma = float(gamma)
    if not gamma > 0:
        raise InputValidationError(f"adaptive gamma must be positive, got {gamma}")
    S = as_symmetric(S, "S")
    if source == "inv-abs-cov":
        return _reciprocal(np.abs(S))
    if source == "inv-sample-precision":
        pilot = invert_pd(S)
    elif source == "inv-lw-linear":
        if X is None:
            raise InputValidationError("inv-lw-linear weights need the data matrix")
        pilot = invert_pd(ledoit_wolf_linear(X))
    else:
        if lam is None:
            raise InputValidationError("inv-glasso-pow weights need a pilot lambda")
        pilot = glasso(S, lam, cfg).omega
    return _reciprocal(np.abs(pilot) ** gamma)


def default_weight_source(S, X=None):
    if is_pd(S) or X is None:
        return "inv-sample-precision"
    return "inv-lw-linear"


def adaptive_glasso(S, lam, cfg=None, X=None, weights=None):
    """Adaptive graphical lasso at penalty ``lam``.

    ``weights`` overrides the weight computation. Otherwise the weight
    source is ``cfg.weight_source`` or, by default, the sample precision
    when ``S`` is PD and the Ledoit-Wolf inverse when it is not.
    """
    cfg = cfg or EstimatorConfig()
    S = as_symmetric(S, "S")
    gamma = DEFAULT_GAMMA["adapt"] if cfg.gamma is None else cfg.gamma
    if weights is None:
        source = cfg.weight_source or default_weight_source(S, X)
        weights = adaptive_weights(source, S, X, gamma, cfg, lam)
    return weighted_glasso(S, weights, lam, cfg, method="adapt", gamma=gamma)
