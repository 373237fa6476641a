"""Penalty grids and k-fold cross-validation on held-out likelihood."""

from dataclasses import dataclass
from typing import List

import numpy as np

from .estimators import METHODS, EstimatorConfig, fit
from .exceptions import DegenerateGrid, InputValidationError, PrecisError
from .linalg import as_sample_data, as_symmetric, gaussian_neg_loglik, sample_covariance

ELNET_GAMMAS = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass
class GridSpec:
    n_points: int = 20
    min_ratio: float = 0.01

    def __post_init__(self):
        if self.n_points < 2:
            raise InputValidationError(f"grid needs at least 2 points, got {self.n_points}")
        if not 0 < self.min_ratio < 1:
            raise InputValidationError(f"min_ratio must lie in (0, 1), got {self.min_ratio}")


@dataclass
class CvConfig:
    k: int = 5
    seed: int = 0
    loss: str = "neg-loglik"

    def __post_init__(self):
        if self.k < 2:
            raise InputValidationError(f"need at least 2 folds, got {self.k}")
        if self.loss != "neg-loglik":
            raise InputValidationError(f"unsupported CV loss {self.loss!r}")


@dataclass
class CvResult:
    grid: List[tuple]
    losses: np.ndarray
    fold_losses: np.ndarray
    selected: tuple
    one_se: tuple

    def to_json(self):
        def cand(c):
            return {"lambda": c[0], "gamma": c[1]}

        return {
            "grid": [cand(c) for c in self.grid],
            "mean_losses": [_json_float(v) for v in self.losses],
            "selected": cand(self.selected),
            "one_se": cand(self.one_se),
        }


def _json_float(v):
    v = float(v)
    return v if np.isfinite(v) else str(v)


def lambda_grid(S, spec=None):
    """Log-spaced penalties from ``max_{i!=j} |s_ij|`` down by ``min_ratio``.

    Returned in descending order.
    """
    spec = spec or GridSpec()
    S = as_symmetric(S, "S")
    off = ~np.eye(S.shape[0], dtype=bool)
    lam_max = float(np.max(np.abs(S[off])))
    if lam_max == 0.0:
        raise DegenerateGrid("covariance has no nonzero off-diagonal entry")
    return list(np.geomspace(lam_max, lam_max * spec.min_ratio, spec.n_points))


def method_grid(X, method, spec=None, gammas=ELNET_GAMMAS, S=None):
    """Candidate ``(lambda, gamma)`` pairs for ``method`` on data ``X``.

    TIGER works on standardized columns, so its grid is built from the
    correlation matrix. Elastic net crosses the lambda grid with
    ``gammas``; the other methods carry ``gamma = None``.
    """
    X = as_sample_data(X)
    if S is None:
        S = sample_covariance(X)
    if method == "tiger":
        sd = np.sqrt(np.diag(S))
        base = S / np.outer(sd, sd)
        base = (base + base.T) / 2.0
    else:
        base = S
    lams = lambda_grid(base, spec)
    if method == "elnet":
        return [(lam, g) for lam in lams for g in gammas]
    return [(lam, None) for lam in lams]


def kfold_split(n, k, seed=0):
    """Shuffle ``range(n)`` with ``seed`` and cut into ``k`` contiguous folds.

    Fold sizes differ by at most one, larger folds first.
    """
    if k > n:
        raise InputValidationError(f"cannot make {k} folds from {n} observations")
    if k < 2:
        raise InputValidationError(f"need at least 2 folds, got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def _normalize_grid(grid):
    out = []
    for c in grid:
        if isinstance(c, tuple):
            lam, gamma = c
        else:
            lam, gamma = c, None
        out.append((float(lam), None if gamma is None else float(gamma)))
    if not out:
        raise InputValidationError("empty candidate grid")
    return out


def cross_validate(X, method, grid, cv=None, cfg=None):
    """k-fold cross-validation over candidate penalties.

    Each candidate is fit on the training rows' covariance and scored by
    ``-log det(O) + tr(S_test O)`` on the held-out rows. The selected
    candidate minimizes the mean loss; ties go to the larger lambda.

    Parameters
    ----------
    grid : sequence of float or (lambda, gamma) pairs
    """
    if method not in METHODS:
        raise InputValidationError(f"unknown method {method!r}")
    X = as_sample_data(X)
    cv = cv or CvConfig()
    cfg = cfg or EstimatorConfig()
    grid = _normalize_grid(grid)
    folds = kfold_split(X.shape[0], cv.k, cv.seed)
    all_idx = np.arange(X.shape[0])
    fold_losses = np.empty((cv.k, len(grid)))
    for f, test in enumerate(folds):
        train = np.setdiff1d(all_idx, test)
        S_train = sample_covariance(X[train])
        S_test = sample_covariance(X[test])
        for c, (lam, gamma) in enumerate(grid):
            try:
                est = fit(method, X[train], lam, gamma, cfg, S=S_train)
                fold_losses[f, c] = gaussian_neg_loglik(est.omega, S_test)
            except (PrecisError, ArithmeticError, np.linalg.LinAlgError):
                fold_losses[f, c] = np.inf
    losses = fold_losses.mean(axis=0)
    best = _argmin_prefer_large(losses, grid)
    with np.errstate(invalid="ignore"):
        se = np.std(fold_losses[:, best], ddof=1) / np.sqrt(cv.k)
    if np.isfinite(se):
        within = [c for c in range(len(grid)) if losses[c] <= losses[best] + se]
        one_se = max(within, key=lambda c: grid[c][0])
    else:
        one_se = best
    return CvResult(grid, losses, fold_losses, grid[best], grid[one_se])


def _argmin_prefer_large(losses, grid):
    best_val = np.min(losses)
    ties = [c for c in range(len(grid)) if losses[c] == best_val]
    # max() keeps the first of equal keys, so grid order breaks gamma ties
    return max(ties, key=lambda c: grid[c][0])


def select_and_fit(X, method, grid_spec=None, cv=None, cfg=None, gammas=ELNET_GAMMAS):
    """Cross-validate ``method`` on its default grid and refit on all rows.

    Returns ``(estimate, cv_result)``.
    """
    X = as_sample_data(X)
    S = sample_covariance(X)
    grid = method_grid(X, method, grid_spec, gammas, S=S)
    result = cross_validate(X, method, grid, cv, cfg)
    lam, gamma = result.selected
    return fit(method, X, lam, gamma, cfg, S=S), result
