"""Constrained l1 minimization for inverse matrix estimation (CLIME).

Each column solves the linear program

    minimize ||b||_1  subject to  ||S b - e_j||_inf <= lam

with ``b = u - v``, ``u, v >= 0``. Columns are then symmetrized by keeping
the smaller-magnitude entry of each pair.
"""

import numpy as np
from scipy.optimize import linprog

from ..exceptions import InputValidationError, SolverFailure
from ..linalg import as_symmetric
from ._base import PrecisionEstimate, check_lambda, symmetrize_min_magnitude


def clime_column(S, j, lam):
    """Solve the CLIME linear program for column ``j``.

    Returns the coefficient vector; raises :class:`SolverFailure` when the
    LP solver does not report an optimum.
    """
    p = S.shape[0]
    e = np.zeros(p)
    e[j] = 1.0
    A = np.block([[S, -S], [-S, S]])
    b = np.concatenate([lam + e, lam - e])
    res = linprog(np.ones(2 * p), A_ub=A, b_ub=b, bounds=(0, None), method="highs")
    if res.status != 0:
        raise SolverFailure(f"CLIME LP failed for column {j}: {res.message}", column=j)
    return res.x[:p] - res.x[p:]


def clime_raw(S, lam):
    """Column-wise CLIME solutions before symmetrization."""
    S = as_symmetric(S, "S")
    lam = check_lambda(lam)
    p = S.shape[0]
    cols = [clime_column(S, j, lam) for j in range(p)]
    return np.column_stack(cols)


def clime(S, lam, cfg=None):
    """CLIME estimate at constraint level ``lam``.

    ``lam = 0`` requires ``S`` to be invertible.
    """
    S = as_symmetric(S, "S")
    lam = check_lambda(lam)
    if lam == 0.0 and np.linalg.matrix_rank(S) < S.shape[0]:
        raise InputValidationError("CLIME with lambda = 0 needs an invertible S")
    raw = clime_raw(S, lam)
    omega = symmetrize_min_magnitude(raw)
    objective = float(np.sum(np.abs(raw)))
    return PrecisionEstimate(omega, "clime", lam, None, True, S.shape[0], objective)
