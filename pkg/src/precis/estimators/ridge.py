"""Ridge-penalized precision matrix with a closed-form solution."""

import numpy as np

from ..linalg import as_symmetric, gaussian_neg_loglik, invert_pd, sym_matrix_sqrt, symmetrize
from ._base import PrecisionEstimate, check_lambda


def ridge_objective(Omega, S, lam):
    return gaussian_neg_loglik(Omega, S) + 0.5 * lam * float(np.sum(Omega**2))


def ridge(S, lam):
    """Minimizer of ``-log det O + tr(S O) + (lam/2) ||O||_F^2``.

    Computed as ``inv( sqrt(lam I + S^2/4) + S/2 )`` (van Wieringen &
    Peeters 2016). PD whenever ``lam > 0``; ``lam = 0`` needs PD ``S``.
    """
    S = as_symmetric(S, "S")
    lam = check_lambda(lam)
    p = S.shape[0]
    inner = symmetrize(S @ S) / 4.0
    inner[np.diag_indices(p)] += lam
    omega = invert_pd(sym_matrix_sqrt(inner) + S / 2.0)
    return PrecisionEstimate(omega, "ridge", lam, None, True, 0, ridge_objective(omega, S, lam))
