"""Dense symmetric linear algebra and Gaussian likelihood primitives.

All matrices are plain ``numpy.ndarray`` objects. Functions never mutate
their inputs.
"""

import numpy as np
from scipy import linalg as sla

from .exceptions import InputValidationError, NotPositiveDefinite

# A Cholesky pivot at or below this fraction of the largest diagonal entry
# classifies the matrix as not positive definite.
PD_PIVOT_RTOL = 1e-12


def as_sample_data(X):
    """Validate an ``(n, p)`` data matrix and return it as float64."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InputValidationError(f"data must be 2-D, got shape {X.shape}")
    n, p = X.shape
    if n < 2 or p < 2:
        raise InputValidationError(f"data needs n >= 2 and p >= 2, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputValidationError("data contains non-finite entries")
    return X


def as_symmetric(M, name="matrix"):
    """Validate a square, exactly symmetric, finite matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputValidationError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputValidationError(f"{name} contains non-finite entries")
    if not np.array_equal(M, M.T):
        raise InputValidationError(f"{name} is not symmetric")
    return M


def symmetrize(M):
    """Average ``M`` with its transpose; the result is bitwise symmetric."""
    return (M + M.T) / 2.0


def sample_covariance(X, center=True):
    """Sample covariance with divisor ``n``.

    Parameters
    ----------
    X : ndarray of shape (n, p)
        Observations in rows.
    center : bool
        Subtract column means before forming cross products.
    """
    X = as_sample_data(X)
    if center:
        X = X - X.mean(axis=0)
    S = X.T @ X / X.shape[0]
    return symmetrize(S)


def cholesky_pd(M):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    Raises
    ------
    NotPositiveDefinite
        If factorization fails or any pivot ``L[j, j]**2`` is at most
        ``1e-12 * max(diag(M))``.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputValidationError(f"matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    scale = np.max(np.diag(M))
    if scale <= 0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(L) ** 2
    if np.any(pivots <= PD_PIVOT_RTOL * scale):
        j = int(np.argmin(pivots))
        raise NotPositiveDefinite(f"pivot {j} is {pivots[j]:.3e}, below tolerance")
    return L


def is_pd(M):
    try:
        cholesky_pd(M)
    except NotPositiveDefinite:
        return False
    return True


def log_det_pd(M):
    """``log det M`` via the Cholesky factor."""
    L = cholesky_pd(M)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def invert_pd(M):
    """Inverse of a positive definite matrix, symmetrized by averaging."""
    L = cholesky_pd(M)
    inv = sla.cho_solve((L, True), np.eye(L.shape[0]))
    return symmetrize(inv)


def sym_matrix_sqrt(M):
    """Principal square root of a symmetric PSD matrix.

    Negative eigenvalues (numerical noise) are clamped to zero.
    """
    M = as_symmetric(M)
    vals, vecs = np.linalg.eigh(M)
    root = vecs @ np.diag(np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return symmetrize(root)


def gaussian_neg_loglik(Omega, S):
    """``-log det(Omega) + tr(S Omega)``.

    This is the data-dependent part of the Gaussian negative log-likelihood,
    without the ``n/2`` factor and the ``p log(2 pi)`` constant.
    """
    Omega = np.asarray(Omega, dtype=float)
    S = np.asarray(S, dtype=float)
    if Omega.shape != S.shape:
        raise InputValidationError(f"shape mismatch {Omega.shape} vs {S.shape}")
    return -log_det_pd(Omega) + float(np.sum(S * Omega))


def ledoit_wolf_linear(X, return_shrinkage=False):
    """Ledoit-Wolf shrinkage of the sample covariance toward ``nu * I``.

    Uses the plug-in intensity estimate of Ledoit and Wolf (2004) on
    column-centered data, with ``nu = tr(S) / p``.

    Returns
    -------
    ndarray, or (ndarray, float) if ``return_shrinkage``
        The shrunk covariance and optionally the intensity in ``[0, 1]``.
    """
    X = as_sample_data(X)
    n, p = X.shape
    Xc = X - X.mean(axis=0)
    S = symmetrize(Xc.T @ Xc / n)
    nu = np.trace(S) / p
    target_gap = S.copy()
    target_gap[np.diag_indices(p)] -= nu
    delta2 = np.sum(target_gap**2) / p
    if delta2 <= 0.0:
        rho = 0.0
    else:
        # average squared distance of rank-one terms x x^T from S
        X2 = Xc**2
        beta_bar2 = (np.sum((X2.T @ X2)) / n - np.sum(S**2)) / (n * p)
        rho = float(np.clip(min(beta_bar2, delta2) / delta2, 0.0, 1.0))
    shrunk = (1.0 - rho) * S
    shrunk[np.diag_indices(p)] += rho * nu
    shrunk = symmetrize(shrunk)
    return (shrunk, rho) if return_shrinkage else shrunk
